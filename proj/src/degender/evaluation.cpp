#include "degender/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "degender/errors.hpp"
#include "degender/util.hpp"

namespace degender {

double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw UsageError("auroc: scores and labels differ in length");
    }
    const size_t n = scores.size();
    size_t n_pos = 0;
    for (int label : labels) n_pos += (label != 0);
    const size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw DataError("auroc: labels contain a single class");
    }

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // Doubled ranks stay integral under tie averaging: a tie group occupying
    // 0-based positions [lo, hi) has doubled average rank lo + hi + 1.
    unsigned long long rank2_pos_sum = 0;
    size_t lo = 0;
    while (lo < n) {
        size_t hi = lo + 1;
        while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
        for (size_t k = lo; k < hi; ++k) {
            if (labels[order[k]] != 0) {
                rank2_pos_sum += static_cast<unsigned long long>(lo + hi + 1);
            }
        }
        lo = hi;
    }
    // 2U = 2 * wins + ties
    const unsigned long long u2 =
        rank2_pos_sum - static_cast<unsigned long long>(n_pos) * (n_pos + 1);
    return static_cast<double>(u2) /
           (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

WithinJobResult within_job_auroc(std::span<const ScoredExample> scored) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> by_job;
    for (const ScoredExample& ex : scored) {
        auto& bucket = by_job[ex.job_id];
        bucket.first.push_back(ex.score);
        bucket.second.push_back(ex.label);
    }
    WithinJobResult result;
    double weighted_sum = 0.0;
    size_t total_weight = 0;
    for (const auto& [job_id, bucket] : by_job) {
        const auto& [scores, labels] = bucket;
        bool has_pos = false, has_neg = false;
        for (int label : labels) (label != 0 ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg) {
            ++result.n_skipped_jobs;
            continue;
        }
        double job_auroc = auroc(scores, labels);
        result.per_job.push_back({job_id, job_auroc, labels.size()});
        weighted_sum += job_auroc * static_cast<double>(labels.size());
        total_weight += labels.size();
    }
    if (total_weight > 0) {
        result.within_job_auroc = weighted_sum / static_cast<double>(total_weight);
    }
    return result;
}

std::vector<LadderRow> run_ladder(std::span<const size_t> grid, size_t max_k,
                                  const std::function<LadderPoint(size_t)>& evaluate_k,
                                  const std::string& label_prefix) {
    std::vector<size_t> ks{0};
    for (size_t i = 0; i < grid.size(); ++i) {
        if (i > 0 && grid[i] < grid[i - 1]) {
            throw UsageError("ladder grid must be ascending");
        }
        size_t k = grid[i];
        if (k > max_k) {
            std::fprintf(stderr,
                         "warning: ladder k=%zu exceeds ranking length %zu; clamped\n", k,
                         max_k);
            k = max_k;
        }
        if (k != ks.back()) ks.push_back(k);
    }
    std::vector<LadderRow> rows;
    rows.reserve(ks.size());
    for (size_t k : ks) {
        LadderPoint point = evaluate_k(k);
        LadderRow row;
        row.experiment_label =
            k == 0 ? label_prefix : label_prefix + "+top_" + std::to_string(k);
        row.k_removed = k;
        row.gender_auroc = point.gender_auroc;
        row.gender_within_job_auroc = point.gender_within_job_auroc;
        row.screening_auroc = point.screening_auroc;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string optional_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace

void emit_tradeoff(std::span<const LadderRow> rows, const std::string& path) {
    if (rows.empty()) throw UsageError("emit_tradeoff: no rows");
    std::ostringstream out;
    out << "experiment_label,k_removed,gender_auroc,gender_within_job_auroc,screening_auroc\n";
    for (const LadderRow& row : rows) {
        out << row.experiment_label << ',' << row.k_removed << ','
            << format_double(row.gender_auroc) << ','
            << optional_field(row.gender_within_job_auroc) << ','
            << optional_field(row.screening_auroc) << '\n';
    }
    write_file(path, out.str());
}

void emit_tradeoff_jsonl(std::span<const LadderRow> rows, const std::string& path) {
    if (rows.empty()) throw UsageError("emit_tradeoff: no rows");
    std::ostringstream out;
    for (const LadderRow& row : rows) {
        nlohmann::json obj{{"experiment_label", row.experiment_label},
                           {"k_removed", row.k_removed},
                           {"gender_auroc", row.gender_auroc}};
        obj["gender_within_job_auroc"] =
            row.gender_within_job_auroc ? nlohmann::json(*row.gender_within_job_auroc)
                                        : nlohmann::json();
        obj["screening_auroc"] =
            row.screening_auroc ? nlohmann::json(*row.screening_auroc) : nlohmann::json();
        out << obj.dump() << '\n';
    }
    write_file(path, out.str());
}

std::vector<LadderRow> parse_tradeoff(const std::string& path) {
    std::string text = read_file(path);
    std::vector<std::string> lines = split(text, '\n');
    if (lines.empty() ||
        trim(lines[0]) !=
            "experiment_label,k_removed,gender_auroc,gender_within_job_auroc,screening_auroc") {
        throw DataError("tradeoff file missing header: " + path);
    }
    std::vector<LadderRow> rows;
    for (size_t i = 1; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty()) continue;
        std::vector<std::string> cols = split(line, ',');
        if (cols.size() != 5) {
            throw DataError("tradeoff file line " + std::to_string(i + 1) + ": expected 5 columns");
        }
        LadderRow row;
        row.experiment_label = cols[0];
        row.k_removed = static_cast<size_t>(std::stoull(cols[1]));
        row.gender_auroc = std::stod(cols[2]);
        if (!cols[3].empty()) row.gender_within_job_auroc = std::stod(cols[3]);
        if (!cols[4].empty()) row.screening_auroc = std::stod(cols[4]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string tradeoff_summary(std::span<const LadderRow> rows) {
    auto spark = [](double v) {
        static const char levels[] = ".:-=+*#@";
        double t = std::clamp((v - 0.5) * 2.0, 0.0, 1.0);
        return levels[static_cast<size_t>(t * 7.0 + 0.5)];
    };
    std::ostringstream out;
    out << "k_removed:";
    for (const LadderRow& row : rows) out << ' ' << row.k_removed;
    out << "\ngender_auroc:";
    for (const LadderRow& row : rows) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), " %.3f", row.gender_auroc);
        out << buf;
    }
    out << "  [";
    for (const LadderRow& row : rows) out << spark(row.gender_auroc);
    out << "]";
    bool any_screening = false;
    for (const LadderRow& row : rows) any_screening |= row.screening_auroc.has_value();
    if (any_screening) {
        out << "\nscreening_auroc:";
        for (const LadderRow& row : rows) {
            if (row.screening_auroc) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), " %.3f", *row.screening_auroc);
                out << buf;
            } else {
                out << " -";
            }
        }
        out << "  [";
        for (const LadderRow& row : rows) {
            out << (row.screening_auroc ? spark(*row.screening_auroc) : ' ');
        }
        out << "]";
    }
    out << '\n';
    return out.str();
}

}  // namespace degender
