#pragma once

#include "gaitreid/gbdt/ensemble.hpp"
#include "gaitreid/gbdt/params.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gaitreid {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    std::vector<int> labels;
    std::vector<std::vector<std::uint64_t>> counts;
    std::uint64_t total = 0;

    std::size_t size() const { return labels.size(); }
    std::uint64_t trace() const;
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> actual,
                                 std::vector<int> labels);

struct ClassMetrics {
    int label = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    bool precision_degenerate = false;  // TP + FP == 0
    bool recall_degenerate = false;     // TP + FN == 0
    bool f1_degenerate = false;         // P + R == 0
    friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct EvaluationReport {
    double accuracy = 0.0;
    std::vector<ClassMetrics> classes;
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
    double micro_precision = 0.0, micro_recall = 0.0, micro_f1 = 0.0;
    std::uint64_t total = 0;
    std::optional<double> track_accuracy;
    std::optional<std::size_t> tracks;
    friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

EvaluationReport classification_report(const ConfusionMatrix& matrix);

/// Most frequent per-frame argmax label. Ties go to the larger summed probability, then the
/// smaller label. `labels[k]` names column k of each distribution.
int majority_vote(const std::vector<std::vector<double>>& frame_probs, std::span<const int> labels);

/// Human-readable table: Class, Precision, Recall, F1, Support.
std::string render_table(const EvaluationReport& report);
/// report.csv body: one row per class, then summary rows.
std::string to_report_csv(const EvaluationReport& report);
EvaluationReport parse_report_csv(const std::string& text);
std::string to_confusion_csv(const ConfusionMatrix& matrix);
ConfusionMatrix parse_confusion_csv(const std::string& text);

/// Current resident set of this process in MiB, read from /proc/self/status.
double current_rss_mb();

struct BenchRun {
    int run = 0;
    double seconds = 0.0;
    double peak_mb = 0.0;  // peak resident-set growth during the run
};

struct BenchReport {
    std::vector<BenchRun> runs;
    double median_seconds = 0.0;
    double median_peak_mb = 0.0;
    std::size_t rows = 0;
    std::size_t features = 0;
};

/// Trains `repetitions` times, one at a time, sampling RSS every 50 ms.
BenchReport benchmark_training(const gbdt::LabeledData& data, const gbdt::TrainParams& params, int repetitions);

std::string to_bench_csv(const BenchReport& report);
std::string to_bench_json(const BenchReport& report);

}  // namespace gaitreid
