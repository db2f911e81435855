#include "doctest.h"

#include <cstdio>
#include <string>

#include "degender/errors.hpp"
#include "degender/evaluation.hpp"
#include "degender/rng.hpp"

using namespace degender;

namespace {

// independent oracle: exhaustive O(n^2) pair enumeration with the same
// integer arithmetic (2*wins + ties), so equality is exact
double pairwise_auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    unsigned long long wins2 = 0, n_pos = 0, n_neg = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i]) {
            ++n_pos;
        } else {
            ++n_neg;
        }
    }
    for (size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            if (scores[i] > scores[j]) {
                wins2 += 2;
            } else if (scores[i] == scores[j]) {
                wins2 += 1;
            }
        }
    }
    return static_cast<double>(wins2) / (2.0 * static_cast<double>(n_pos) *
                                         static_cast<double>(n_neg));
}

}  // namespace

TEST_CASE("auroc: perfect separation") {
    std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
    std::vector<int> labels = {1, 1, 0, 0};
    CHECK(auroc(scores, labels) == 1.0);
}

TEST_CASE("auroc: all ties give exactly one half") {
    std::vector<double> scores = {0.4, 0.4, 0.4, 0.4};
    std::vector<int> labels = {1, 0, 1, 0};
    CHECK(auroc(scores, labels) == 0.5);
}

TEST_CASE("auroc: hand-enumerated 3/4 case") {
    std::vector<double> scores = {0.9, 0.6, 0.4, 0.2};
    std::vector<int> labels = {1, 0, 1, 0};
    CHECK(auroc(scores, labels) == 0.75);
}

TEST_CASE("auroc: single-class labels are rejected") {
    std::vector<double> scores = {0.1, 0.2};
    std::vector<int> ones = {1, 1};
    std::vector<int> zeros = {0, 0};
    CHECK_THROWS_AS(auroc(scores, ones), DataError);
    CHECK_THROWS_AS(auroc(scores, zeros), DataError);
    std::vector<int> short_labels = {1};
    CHECK_THROWS_AS(auroc(scores, short_labels), UsageError);
}

TEST_CASE("auroc: bitwise equal to pair enumeration on random tied instances") {
    Rng rng(2024);
    for (int round = 0; round < 500; ++round) {
        size_t n = 2 + rng.uniform_index(199);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (size_t i = 0; i < n; ++i) {
            // coarse score grid forces plenty of ties
            scores[i] = static_cast<double>(rng.uniform_index(8)) / 7.0;
            labels[i] = rng.bernoulli(0.4) ? 1 : 0;
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(auroc(scores, labels) == pairwise_auroc(scores, labels));
    }
}

TEST_CASE("auroc: complement symmetry and monotone-transform invariance") {
    Rng rng(5);
    for (int round = 0; round < 100; ++round) {
        size_t n = 4 + rng.uniform_index(40);
        std::vector<double> scores(n);
        std::vector<int> labels(n), flipped(n);
        bool has_pos = false, has_neg = false;
        for (size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.uniform_index(5));
            labels[i] = rng.bernoulli(0.5) ? 1 : 0;
            flipped[i] = 1 - labels[i];
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(auroc(scores, labels) + auroc(scores, flipped) == doctest::Approx(1.0).epsilon(1e-12));

        std::vector<double> transformed(n);
        for (size_t i = 0; i < n; ++i) transformed[i] = std::exp(scores[i] * 0.5) + 3.0;
        CHECK(auroc(transformed, labels) == auroc(scores, labels));
    }
}

TEST_CASE("within_job_auroc: single separable job") {
    std::vector<ScoredExample> scored = {{"J1", 0.9, 1}, {"J1", 0.1, 0}};
    WithinJobResult result = within_job_auroc(scored);
    REQUIRE(result.within_job_auroc.has_value());
    CHECK(*result.within_job_auroc == 1.0);
    CHECK(result.n_skipped_jobs == 0);
}

TEST_CASE("within_job_auroc: applicant-count weighting") {
    std::vector<ScoredExample> scored = {
        {"J1", 0.9, 1}, {"J1", 0.8, 1}, {"J1", 0.2, 0}, {"J1", 0.1, 0},  // auroc 1.0, n=4
        {"J2", 0.5, 1}, {"J2", 0.5, 0},                                  // auroc 0.5, n=2
    };
    WithinJobResult result = within_job_auroc(scored);
    REQUIRE(result.within_job_auroc.has_value());
    CHECK(*result.within_job_auroc == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

    // the EvalReport identity is recomputable from per_job
    double weighted = 0.0;
    size_t total = 0;
    for (const PerJobAuroc& job : result.per_job) {
        weighted += job.auroc * static_cast<double>(job.n_applicants);
        total += job.n_applicants;
    }
    CHECK(weighted / static_cast<double>(total) == *result.within_job_auroc);
}

TEST_CASE("within_job_auroc: single-class jobs are skipped, all-skipped is absent") {
    std::vector<ScoredExample> scored = {
        {"J1", 0.9, 1}, {"J1", 0.8, 1},  // males only
        {"J2", 0.3, 0},                  // females only
        {"J3", 0.7, 1}, {"J3", 0.2, 0},
    };
    WithinJobResult result = within_job_auroc(scored);
    CHECK(result.n_skipped_jobs == 2);
    REQUIRE(result.within_job_auroc.has_value());
    CHECK(*result.within_job_auroc == 1.0);

    std::vector<ScoredExample> all_single = {{"J1", 0.9, 1}, {"J2", 0.3, 0}};
    WithinJobResult absent = within_job_auroc(all_single);
    CHECK_FALSE(absent.within_job_auroc.has_value());
    CHECK(absent.n_skipped_jobs == 2);
}

TEST_CASE("run_ladder: degenerate grid reproduces the base plan row") {
    size_t calls = 0;
    std::vector<LadderRow> rows = run_ladder({}, 100, [&](size_t k) {
        ++calls;
        LadderPoint p;
        p.gender_auroc = 0.8 - static_cast<double>(k) * 0.001;
        return p;
    });
    CHECK(calls == 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].experiment_label == "base");
    CHECK(rows[0].k_removed == 0);
}

TEST_CASE("run_ladder: clamps oversized ks and rejects descending grids") {
    std::vector<size_t> grid = {10, 20, 500};
    std::vector<LadderRow> rows = run_ladder(grid, 100, [&](size_t k) {
        LadderPoint p;
        p.gender_auroc = 1.0 - static_cast<double>(k) / 200.0;
        p.screening_auroc = 0.7;
        return p;
    });
    REQUIRE(rows.size() == 4);  // 0, 10, 20, 100
    CHECK(rows.back().k_removed == 100);
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].k_removed > rows[i - 1].k_removed);

    std::vector<size_t> descending = {20, 10};
    CHECK_THROWS_AS(run_ladder(descending, 100, [](size_t) { return LadderPoint{}; }),
                    UsageError);
}

TEST_CASE("tradeoff csv: emit then parse is the identity") {
    std::vector<LadderRow> rows;
    rows.push_back({"base", 0, 0.851234567890123, 0.83, 0.71});
    rows.push_back({"base+top_10", 10, 0.77, std::nullopt, 0.705});
    rows.push_back({"base+top_40", 40, 0.52, 0.51, std::nullopt});

    std::string path = "tradeoff_roundtrip_test.csv";
    emit_tradeoff(rows, path);
    std::vector<LadderRow> parsed = parse_tradeoff(path);
    REQUIRE(parsed.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) CHECK(parsed[i] == rows[i]);
    std::remove(path.c_str());

    CHECK_THROWS_AS(emit_tradeoff({}, path), UsageError);
    CHECK_THROWS_AS(emit_tradeoff(rows, "/nonexistent_dir_xyz/file.csv"), DataError);
}

TEST_CASE("tradeoff summary renders every row") {
    std::vector<LadderRow> rows;
    rows.push_back({"base", 0, 0.85, 0.83, 0.71});
    rows.push_back({"base+top_10", 10, 0.61, 0.60, 0.70});
    std::string summary = tradeoff_summary(rows);
    CHECK(summary.find("0.850") != std::string::npos);
    CHECK(summary.find("0.610") != std::string::npos);
    CHECK(summary.find("screening") != std::string::npos);
}
