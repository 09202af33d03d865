#include "gaitreid/evaluation.hpp"

#include "gaitreid/csv.hpp"
#include "gaitreid/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace gaitreid {

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> actual, std::vector<int> labels) {
    if (predicted.size() != actual.size()) throw ContractViolation("predicted and actual lengths differ");
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = i;

    ConfusionMatrix m;
    m.labels = labels;
    m.counts.assign(labels.size(), std::vector<std::uint64_t>(labels.size(), 0));
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const auto t = index.find(actual[i]);
        const auto p = index.find(predicted[i]);
        if (t == index.end() || p == index.end()) throw ContractViolation("label outside the class set");
        ++m.counts[t->second][p->second];
        ++m.total;
    }
    return m;
}

EvaluationReport classification_report(const ConfusionMatrix& m) {
    if (m.total == 0 || m.size() == 0) throw EmptyInputError("confusion matrix is empty");
    EvaluationReport r;
    r.total = m.total;
    const double total = static_cast<double>(m.total);
    r.accuracy = static_cast<double>(m.trace()) / total;

    std::uint64_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        std::uint64_t tp = m.counts[k][k], col = 0, row = 0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            col += m.counts[j][k];
            row += m.counts[k][j];
        }
        const std::uint64_t fp = col - tp;
        const std::uint64_t fn = row - tp;
        tp_sum += tp;
        fp_sum += fp;
        fn_sum += fn;

        ClassMetrics c;
        c.label = m.labels[k];
        c.support = row;
        c.precision_degenerate = tp + fp == 0;
        c.recall_degenerate = tp + fn == 0;
        c.precision = c.precision_degenerate ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        c.recall = c.recall_degenerate ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        c.f1_degenerate = c.precision + c.recall == 0.0;
        c.f1 = c.f1_degenerate ? 0.0 : 2.0 * c.precision * c.recall / (c.precision + c.recall);
        r.macro_precision += c.precision;
        r.macro_recall += c.recall;
        r.macro_f1 += c.f1;
        r.classes.push_back(c);
    }
    const double k = static_cast<double>(m.size());
    r.macro_precision /= k;
    r.macro_recall /= k;
    r.macro_f1 /= k;
    // Single-label scoring: every miss is one FP and one FN, so both micro rates equal accuracy.
    r.micro_precision = tp_sum + fp_sum ? static_cast<double>(tp_sum) / static_cast<double>(tp_sum + fp_sum) : 0.0;
    r.micro_recall = tp_sum + fn_sum ? static_cast<double>(tp_sum) / static_cast<double>(tp_sum + fn_sum) : 0.0;
    r.micro_f1 = r.micro_precision + r.micro_recall > 0.0
                     ? 2.0 * r.micro_precision * r.micro_recall / (r.micro_precision + r.micro_recall)
                     : 0.0;
    return r;
}

int majority_vote(const std::vector<std::vector<double>>& frame_probs, std::span<const int> labels) {
    if (frame_probs.empty()) throw EmptyInputError("cannot vote on an empty track");
    const std::size_t k = labels.size();
    std::vector<std::size_t> votes(k, 0);
    std::vector<double> mass(k, 0.0);
    for (const auto& p : frame_probs) {
        if (p.size() != k) throw ContractViolation("distribution length differs from label count");
        ++votes[gbdt::argmax(p)];
        for (std::size_t j = 0; j < k; ++j) mass[j] += p[j];
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
        const bool better = votes[j] != votes[best] ? votes[j] > votes[best]
                            : mass[j] != mass[best] ? mass[j] > mass[best]
                                                    : labels[j] < labels[best];
        if (better) best = j;
    }
    return labels[best];
}

std::string render_table(const EvaluationReport& r) {
    std::ostringstream out;
    out << std::left << std::setw(14) << "Class" << std::right << std::setw(11) << "Precision" << std::setw(11)
        << "Recall" << std::setw(11) << "F1" << std::setw(10) << "Support" << '\n';
    out << std::fixed << std::setprecision(4);
    for (const auto& c : r.classes)
        out << std::left << std::setw(14) << ("Person " + std::to_string(c.label)) << std::right << std::setw(11)
            << c.precision << std::setw(11) << c.recall << std::setw(11) << c.f1 << std::setw(10) << c.support << '\n';
    out << std::left << std::setw(14) << "macro avg" << std::right << std::setw(11) << r.macro_precision
        << std::setw(11) << r.macro_recall << std::setw(11) << r.macro_f1 << std::setw(10) << r.total << '\n';
    out << std::left << std::setw(14) << "accuracy" << std::right << std::setw(33) << r.accuracy << std::setw(10)
        << r.total << '\n';
    if (r.track_accuracy)
        out << std::left << std::setw(14) << "track accuracy" << std::right << std::setw(33) << *r.track_accuracy
            << std::setw(10) << r.tracks.value_or(0) << '\n';
    return out.str();
}

namespace {

std::string flags(const ClassMetrics& c) {
    std::string f;
    if (c.precision_degenerate) f += 'P';
    if (c.recall_degenerate) f += 'R';
    if (c.f1_degenerate) f += 'F';
    return f;
}

double number(const std::string& cell, const std::string& what) {
    const auto v = csv::parse_double(cell);
    if (!v) throw DataError("report: bad number for " + what);
    return *v;
}

std::uint64_t count(const std::string& cell, const std::string& what) {
    const auto v = csv::parse_int(cell);
    if (!v || *v < 0) throw DataError("report: bad count for " + what);
    return static_cast<std::uint64_t>(*v);
}

}  // namespace

std::string to_report_csv(const EvaluationReport& r) {
    using csv::format_double;
    std::ostringstream out;
    out << "CLASS,PRECISION,RECALL,F1,SUPPORT,DEGENERATE\n";
    for (const auto& c : r.classes)
        out << c.label << ',' << format_double(c.precision) << ',' << format_double(c.recall) << ','
            << format_double(c.f1) << ',' << c.support << ',' << flags(c) << '\n';
    out << "macro_avg," << format_double(r.macro_precision) << ',' << format_double(r.macro_recall) << ','
        << format_double(r.macro_f1) << ',' << r.total << ",\n";
    out << "micro_avg," << format_double(r.micro_precision) << ',' << format_double(r.micro_recall) << ','
        << format_double(r.micro_f1) << ',' << r.total << ",\n";
    out << "accuracy,,," << format_double(r.accuracy) << ',' << r.total << ",\n";
    if (r.track_accuracy) out << "track_accuracy,,," << format_double(*r.track_accuracy) << ',' << r.tracks.value_or(0) << ",\n";
    return out.str();
}

EvaluationReport parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("report is empty");
    EvaluationReport r;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = csv::split_line(line);
        cells.resize(6);
        const auto& key = cells[0];
        if (key == "macro_avg") {
            r.macro_precision = number(cells[1], key);
            r.macro_recall = number(cells[2], key);
            r.macro_f1 = number(cells[3], key);
            r.total = count(cells[4], key);
        } else if (key == "micro_avg") {
            r.micro_precision = number(cells[1], key);
            r.micro_recall = number(cells[2], key);
            r.micro_f1 = number(cells[3], key);
        } else if (key == "accuracy") {
            r.accuracy = number(cells[3], key);
        } else if (key == "track_accuracy") {
            r.track_accuracy = number(cells[3], key);
            r.tracks = count(cells[4], key);
        } else {
            ClassMetrics c;
            const auto label = csv::parse_int(key);
            if (!label) throw DataError("report: bad class label " + key);
            c.label = static_cast<int>(*label);
            c.precision = number(cells[1], key);
            c.recall = number(cells[2], key);
            c.f1 = number(cells[3], key);
            c.support = count(cells[4], key);
            c.precision_degenerate = cells[5].find('P') != std::string::npos;
            c.recall_degenerate = cells[5].find('R') != std::string::npos;
            c.f1_degenerate = cells[5].find('F') != std::string::npos;
            r.classes.push_back(c);
        }
    }
    return r;
}

std::string to_confusion_csv(const ConfusionMatrix& m) {
    std::ostringstream out;
    out << "TRUE\\PREDICTED";
    for (int l : m.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m.labels[i];
        for (auto c : m.counts[i]) out << ',' << c;
        out << '\n';
    }
    return out.str();
}

ConfusionMatrix parse_confusion_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("confusion matrix file is empty");
    ConfusionMatrix m;
    const auto header = csv::split_line(line);
    for (std::size_t i = 1; i < header.size(); ++i) m.labels.push_back(static_cast<int>(count(header[i], "label")));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = csv::split_line(line);
        if (cells.size() != header.size()) throw DataError("confusion matrix row has the wrong width");
        std::vector<std::uint64_t> row;
        for (std::size_t i = 1; i < cells.size(); ++i) {
            row.push_back(count(cells[i], "cell"));
            m.total += row.back();
        }
        m.counts.push_back(std::move(row));
    }
    return m;
}

namespace {

double status_field_mb(const char* field) {
    std::ifstream in("/proc/self/status");
    std::string line;
    const std::string key = std::string(field) + ":";
    while (std::getline(in, line)) {
        if (line.rfind(key, 0) == 0) {
            std::istringstream s(line.substr(key.size()));
            double kb = 0.0;
            s >> kb;
            return kb / 1024.0;
        }
    }
    return 0.0;
}

bool reset_peak_rss() {
    std::ofstream out("/proc/self/clear_refs");
    if (!out) return false;
    out << "5";
    return static_cast<bool>(out.flush());
}

}  // namespace

double current_rss_mb() { return status_field_mb("VmRSS"); }

BenchReport benchmark_training(const gbdt::LabeledData& data, const gbdt::TrainParams& params, int repetitions) {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    BenchReport report;
    report.rows = data.features.rows();
    report.features = data.features.cols();
    for (int run = 0; run < repetitions; ++run) {
        const bool hwm_reset = reset_peak_rss();
        const double base = current_rss_mb();
        std::atomic<bool> done{false};
        std::atomic<double> peak{base};
        std::thread sampler([&] {
            while (!done.load()) {
                const double now = current_rss_mb();
                if (now > peak.load()) peak.store(now);
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
        });
        const auto t0 = std::chrono::steady_clock::now();
        {
            const auto result = gbdt::train(data, params);
            const double now = current_rss_mb();
            if (now > peak.load()) peak.store(now);
        }
        const auto t1 = std::chrono::steady_clock::now();
        done = true;
        sampler.join();
        double top = peak.load();
        if (hwm_reset) top = std::max(top, status_field_mb("VmHWM"));
        report.runs.push_back({run + 1, std::chrono::duration<double>(t1 - t0).count(), std::max(0.0, top - base)});
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    };
    std::vector<double> secs, mbs;
    for (const auto& r : report.runs) {
        secs.push_back(r.seconds);
        mbs.push_back(r.peak_mb);
    }
    report.median_seconds = median(secs);
    report.median_peak_mb = median(mbs);
    return report;
}

std::string to_bench_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "run,seconds,peak_mb\n";
    for (const auto& r : report.runs)
        out << r.run << ',' << csv::format_double(r.seconds) << ',' << csv::format_double(r.peak_mb) << '\n';
    return out.str();
}

std::string to_bench_json(const BenchReport& report) {
    nlohmann::json j;
    j["rows"] = report.rows;
    j["features"] = report.features;
    j["median_seconds"] = report.median_seconds;
    j["median_peak_mb"] = report.median_peak_mb;
    j["runs"] = nlohmann::json::array();
    for (const auto& r : report.runs) j["runs"].push_back({{"run", r.run}, {"seconds", r.seconds}, {"peak_mb", r.peak_mb}});
    return j.dump(1) + "\n";
}

}  // namespace gaitreid
