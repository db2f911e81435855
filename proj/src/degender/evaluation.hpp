#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace degender {

// Mann-Whitney AUROC with half credit for ties: exactly the fraction of
// (positive, negative) pairs won plus half the tied ones, computed from
// doubled integer ranks so it matches pair enumeration bit for bit.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct ScoredExample {
    std::string job_id;
    double score = 0.0;
    int label = 0;
};

struct PerJobAuroc {
    std::string job_id;
    double auroc = 0.0;
    size_t n_applicants = 0;
};

struct WithinJobResult {
    // absent when no job has both label classes
    std::optional<double> within_job_auroc;
    std::vector<PerJobAuroc> per_job;  // included jobs only
    size_t n_skipped_jobs = 0;         // jobs lacking one of the classes
};

// Per-job AUROC aggregated as an applicant-count-weighted average over jobs
// that contain both classes.
WithinJobResult within_job_auroc(std::span<const ScoredExample> scored);

struct EvalReport {
    double auroc = 0.0;
    std::optional<double> within_job;
    size_t n_test = 0;
    std::vector<PerJobAuroc> per_job;
    size_t n_skipped_jobs = 0;
};

struct LadderRow {
    std::string experiment_label;
    size_t k_removed = 0;
    double gender_auroc = 0.0;
    std::optional<double> gender_within_job_auroc;
    std::optional<double> screening_auroc;

    bool operator==(const LadderRow&) const = default;
};

struct LadderPoint {
    double gender_auroc = 0.0;
    std::optional<double> gender_within_job_auroc;
    std::optional<double> screening_auroc;
};

// Fixed-model ablation: the k = 0 row reproduces the base plan, larger k
// additionally redacts the top-k ranked tokens. ks beyond max_k are clamped
// (with a warning) and duplicates collapse; grid must be ascending. The
// label prefix distinguishes protocol variants (e.g. the retrain extension).
std::vector<LadderRow> run_ladder(std::span<const size_t> grid, size_t max_k,
                                  const std::function<LadderPoint(size_t)>& evaluate_k,
                                  const std::string& label_prefix = "base");

void emit_tradeoff(std::span<const LadderRow> rows, const std::string& path);
void emit_tradeoff_jsonl(std::span<const LadderRow> rows, const std::string& path);
std::vector<LadderRow> parse_tradeoff(const std::string& path);

// Plain-text summary of a ladder for terminal output.
std::string tradeoff_summary(std::span<const LadderRow> rows);

}  // namespace degender
