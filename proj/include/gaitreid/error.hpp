#pragma once

#include <stdexcept>
#include <string>

namespace gaitreid {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, CLI arguments or split specification. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problems with input data. CLI exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

class SchemaError : public DataError {
public:
    SchemaError(const std::string& column)
        : DataError("missing required column " + column), column_(column) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class ParseError : public DataError {
public:
    ParseError(std::size_t row, const std::string& column, const std::string& what)
        : DataError("row " + std::to_string(row) + ", column " + column + ": " + what),
          row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

class EmptyInputError : public DataError {
public:
    using DataError::DataError;
};

/// A frame or calibration set whose geometry makes a formula undefined.
class DegenerateError : public DataError {
public:
    using DataError::DataError;
};

class CoverageError : public DataError {
public:
    using DataError::DataError;
};

class MissingFactorError : public DataError {
public:
    MissingFactorError(int camera)
        : DataError("no correction factor for camera " + std::to_string(camera)), camera_(camera) {}
    int camera() const noexcept { return camera_; }

private:
    int camera_;
};

/// Model file is unreadable or does not match the data it is applied to. CLI exit code 4.
class CompatibilityError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Wraps an error raised inside a pipeline stage with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what, int exit_code)
        : Error(stage + ": " + what), stage_(std::move(stage)), exit_code_(exit_code) {}
    const std::string& stage() const noexcept { return stage_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

}  // namespace gaitreid
