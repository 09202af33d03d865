#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitreid::csv {

/// Splits one comma-separated line. Quoting is not supported; the formats here never need it.
std::vector<std::string> split_line(std::string_view line);

/// Reads all lines of a text file, stripping trailing '\r'. Throws DataError when unreadable.
std::vector<std::string> read_lines(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict full-cell parse. Accepts "nan"/"inf" spellings. nullopt on any junk.
std::optional<double> parse_double(std::string_view cell);
std::optional<long long> parse_int(std::string_view cell);

/// `key=value` text, one pair per line; '#' starts a comment line.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace gaitreid::csv
