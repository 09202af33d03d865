#include <doctest.h>

#include "gaitreid/error.hpp"
#include "gaitreid/evaluation.hpp"
#include "test_support.hpp"

#include <cmath>
#include <json.hpp>

using namespace gaitreid;

TEST_CASE("confusion matrix worked example") {
    const std::vector<int> actual = {1, 1, 1, 2};
    const std::vector<int> predicted = {1, 1, 2, 2};
    const auto m = confusion_matrix(predicted, actual, {2, 1});
    CHECK(m.labels == std::vector<int>{1, 2});
    CHECK(m.counts == std::vector<std::vector<std::uint64_t>>{{2, 1}, {0, 1}});
    CHECK(m.total == 4);
    CHECK(m.trace() == 3);

    const auto r = classification_report(m);
    CHECK(r.accuracy == 0.75);
    REQUIRE(r.classes.size() == 2);
    CHECK(r.classes[0].precision == 1.0);
    CHECK(r.classes[0].recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(r.classes[0].f1 == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(r.classes[0].support == 3);
    CHECK(r.classes[1].precision == 0.5);
    CHECK(r.classes[1].recall == 1.0);
    CHECK(r.classes[1].f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(r.micro_f1 == 0.75);
    CHECK(r.macro_precision == 0.75);
}

TEST_CASE("confusion matrix input checks") {
    CHECK_THROWS_AS(confusion_matrix(std::vector<int>{1, 2}, std::vector<int>{1}, {1, 2}), ContractViolation);
    CHECK_THROWS_AS(confusion_matrix(std::vector<int>{3}, std::vector<int>{1}, {1, 2}), ContractViolation);
    CHECK_THROWS_AS(classification_report(confusion_matrix(std::vector<int>{}, std::vector<int>{}, {1, 2})),
                    EmptyInputError);
}

TEST_CASE("degenerate classes are flagged and scored zero") {
    // Class 3 never appears, class 2 is never predicted.
    const auto m = confusion_matrix(std::vector<int>{1, 1, 1}, std::vector<int>{1, 2, 1}, {1, 2, 3});
    const auto r = classification_report(m);
    const auto& c2 = r.classes[1];
    CHECK(c2.precision_degenerate);
    CHECK_FALSE(c2.recall_degenerate);
    CHECK(c2.f1_degenerate);
    CHECK(c2.precision == 0.0);
    CHECK(c2.f1 == 0.0);
    const auto& c3 = r.classes[2];
    CHECK(c3.precision_degenerate);
    CHECK(c3.recall_degenerate);
    CHECK(c3.support == 0);
}

TEST_CASE("report matches direct counting on random labels") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 6);
        const std::size_t n = 1 + rng() % 200;
        std::vector<int> a(n), p(n), labels;
        for (int i = 0; i < k; ++i) labels.push_back(i * 3);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = labels[rng() % labels.size()];
            p[i] = rng() % 3 == 0 ? labels[rng() % labels.size()] : a[i];
        }
        const auto m = confusion_matrix(p, a, labels);
        const auto r = classification_report(m);
        std::uint64_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) hits += a[i] == p[i];
        CHECK(r.accuracy == doctest::Approx(static_cast<double>(hits) / static_cast<double>(n)));
        for (std::size_t c = 0; c < labels.size(); ++c) {
            double tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                tp += a[i] == labels[c] && p[i] == labels[c];
                fp += a[i] != labels[c] && p[i] == labels[c];
                fn += a[i] == labels[c] && p[i] != labels[c];
            }
            const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
            const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
            const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
            CHECK(r.classes[c].precision == doctest::Approx(prec).epsilon(1e-12));
            CHECK(r.classes[c].recall == doctest::Approx(rec).epsilon(1e-12));
            CHECK(r.classes[c].f1 == doctest::Approx(f1).epsilon(1e-12));
        }
        CHECK(r.micro_f1 == doctest::Approx(r.accuracy).epsilon(1e-12));
    }
}

TEST_CASE("majority vote") {
    const std::vector<int> labels = {1, 2};
    CHECK(majority_vote({{0.9, 0.1}, {0.8, 0.2}, {0.3, 0.7}}, labels) == 1);
    // One vote each; class 2 carries more probability mass (1.3 against 0.7).
    CHECK(majority_vote({{0.55, 0.45}, {0.15, 0.85}}, labels) == 2);
    // Full tie falls to the smaller label.
    CHECK(majority_vote({{0.6, 0.4}, {0.4, 0.6}}, labels) == 1);
    CHECK(majority_vote({{0.2, 0.8}}, labels) == 2);
    CHECK_THROWS_AS(majority_vote({}, labels), EmptyInputError);
    CHECK_THROWS_AS(majority_vote({{1.0}}, labels), ContractViolation);
}

TEST_CASE("report and confusion CSV round-trip") {
    const auto m = confusion_matrix(std::vector<int>{1, 2, 2, 3, 3, 1}, std::vector<int>{1, 2, 3, 3, 1, 1}, {1, 2, 3});
    auto r = classification_report(m);
    r.track_accuracy = 0.5;
    r.tracks = 4;
    const auto text = to_report_csv(r);
    CHECK(text.rfind("CLASS,PRECISION,RECALL,F1,SUPPORT,DEGENERATE\n", 0) == 0);
    CHECK(parse_report_csv(text) == r);
    CHECK(parse_confusion_csv(to_confusion_csv(m)) == m);
    CHECK(to_confusion_csv(m).rfind("TRUE\\PREDICTED,1,2,3\n", 0) == 0);
    CHECK_THROWS_AS(parse_report_csv(""), EmptyInputError);
    CHECK_THROWS_AS(parse_confusion_csv("TRUE\\PREDICTED,1,2\n1,3\n"), DataError);
    const auto table = render_table(r);
    CHECK(table.find("Precision") != std::string::npos);
}

TEST_CASE("single-run benchmark reports that run") {
    const auto d = testing::blobs(1, 200, 3, 3);
    auto p = gbdt::TrainParams::without_sampling();
    p.num_iterations = 5;
    const auto b = benchmark_training(d, p, 1);
    REQUIRE(b.runs.size() == 1);
    CHECK(b.median_seconds == b.runs[0].seconds);
    CHECK(b.median_peak_mb == b.runs[0].peak_mb);
    CHECK(b.rows == 200);
    CHECK(b.features == 3);
    CHECK(current_rss_mb() > 0.0);
    const auto j = nlohmann::json::parse(to_bench_json(b));
    CHECK(j.at("runs").size() == 1);
    CHECK(to_bench_csv(b).find('\n') != std::string::npos);
    CHECK_THROWS_AS(benchmark_training(d, p, 0), ConfigError);
}
