#include "degender/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "degender/errors.hpp"
#include "degender/rng.hpp"
#include "degender/util.hpp"

namespace degender {

double Attribution::total() const {
    double sum = absent_feature_offset;
    for (const auto& [token, phi] : per_token) sum += phi;
    return sum;
}

LinearAttributor::LinearAttributor(const LinearModel& model, const TfIdfVectorizer& vectorizer,
                                   std::vector<double> background_mean)
    : model_(model), vectorizer_(vectorizer), background_(std::move(background_mean)) {
    if (model_.feature_space != FeatureSpace::TfIdf) {
        throw UsageError("attribute_linear: model is not in tf-idf feature space");
    }
    if (model_.weights.size() != vectorizer_.vocab_size() ||
        background_.size() != vectorizer_.vocab_size()) {
        throw UsageError("attribute_linear: feature-space size mismatch");
    }
    for (size_t j = 0; j < background_.size(); ++j) {
        w_dot_background_ += model_.weights[j] * background_[j];
    }
    background_score_ = w_dot_background_ + model_.bias;
}

Attribution LinearAttributor::attribute(const std::string& resume_id,
                                        const TokenStream& doc) const {
    SparseVector x = vectorizer_.transform(doc);
    Attribution out;
    out.resume_id = resume_id;
    double present_background = 0.0;
    for (const SparseFeature& f : x) {
        double phi = model_.weights[f.index] * (f.value - background_[f.index]);
        out.per_token[vectorizer_.tokens()[f.index]] = phi;
        present_background += model_.weights[f.index] * background_[f.index];
    }
    // contribution of every vocabulary feature the document lacks
    out.absent_feature_offset = -(w_dot_background_ - present_background);
    return out;
}

std::vector<double> mean_transformed(const TfIdfVectorizer& vectorizer,
                                     std::span<const SparseVector> X) {
    std::vector<double> mean(vectorizer.vocab_size(), 0.0);
    if (X.empty()) return mean;
    for (const SparseVector& x : X) {
        for (const SparseFeature& f : x) mean[f.index] += f.value;
    }
    double inv = 1.0 / static_cast<double>(X.size());
    for (double& v : mean) v *= inv;
    return mean;
}

MaskingAttribution attribute_masking(const std::function<double(const TokenStream&)>& scorer,
                                     const std::string& resume_id, const TokenStream& doc,
                                     size_t n_samples, uint64_t seed) {
    if (n_samples < 1) throw UsageError("attribute_masking: n_samples must be >= 1");

    std::set<std::string> type_set;
    for (const std::string& token : doc.tokens) {
        if (token != kDeletedMarker) type_set.insert(token);
    }
    std::vector<std::string> types(type_set.begin(), type_set.end());
    MaskingAttribution out;
    out.attribution.resume_id = resume_id;
    out.n_samples = n_samples;
    if (types.empty()) return out;

    std::map<std::string, size_t> type_index;
    for (size_t t = 0; t < types.size(); ++t) type_index[types[t]] = t;
    std::vector<size_t> token_type(doc.size(), SIZE_MAX);
    for (size_t i = 0; i < doc.size(); ++i) {
        auto it = type_index.find(doc.tokens[i]);
        if (it != type_index.end()) token_type[i] = it->second;
    }

    std::vector<bool> unmasked(types.size(), false);
    TokenStream masked = doc;
    auto rebuild = [&]() {
        for (size_t i = 0; i < doc.size(); ++i) {
            if (token_type[i] == SIZE_MAX) continue;  // already a marker
            masked.tokens[i] =
                unmasked[token_type[i]] ? doc.tokens[i] : std::string(kDeletedMarker);
        }
    };

    rebuild();
    const double empty_score = scorer(masked);

    Rng rng(seed);
    std::vector<size_t> order(types.size());
    std::vector<double> mean(types.size(), 0.0);
    std::vector<double> m2(types.size(), 0.0);
    for (size_t s = 0; s < n_samples; ++s) {
        for (size_t t = 0; t < types.size(); ++t) order[t] = t;
        rng.shuffle(order);
        std::fill(unmasked.begin(), unmasked.end(), false);
        rebuild();
        double previous = empty_score;
        for (size_t t : order) {
            unmasked[t] = true;
            for (size_t i = 0; i < doc.size(); ++i) {
                if (token_type[i] == t) masked.tokens[i] = doc.tokens[i];
            }
            double current = scorer(masked);
            double delta = current - previous;
            previous = current;
            // Welford across permutations
            double count = static_cast<double>(s + 1);
            double d1 = delta - mean[t];
            mean[t] += d1 / count;
            m2[t] += d1 * (delta - mean[t]);
        }
    }

    for (size_t t = 0; t < types.size(); ++t) {
        out.attribution.per_token[types[t]] = mean[t];
        double variance = n_samples > 1 ? m2[t] / static_cast<double>(n_samples - 1) : 0.0;
        out.stderr_per_token[types[t]] =
            std::sqrt(std::max(0.0, variance) / static_cast<double>(n_samples));
    }
    return out;
}

std::string to_string(LeanDirection d) {
    switch (d) {
        case LeanDirection::MaleLeaning: return "male_leaning";
        case LeanDirection::FemaleLeaning: return "female_leaning";
        case LeanDirection::Ambiguous: return "ambiguous";
    }
    return "ambiguous";
}

LeanDirection lean_direction_from_string(const std::string& s) {
    if (s == "male_leaning") return LeanDirection::MaleLeaning;
    if (s == "female_leaning") return LeanDirection::FemaleLeaning;
    if (s == "ambiguous") return LeanDirection::Ambiguous;
    throw DataError("invalid direction value: \"" + s + "\"");
}

FeatureRanking rank_features(std::span<const Attribution> attributions, int male_sign) {
    if (attributions.empty()) throw UsageError("rank_features: no attributions");
    struct Acc {
        double sum_abs = 0.0;
        double sum_signed = 0.0;
        size_t count = 0;
    };
    std::map<std::string, Acc> acc;
    for (const Attribution& attr : attributions) {
        for (const auto& [token, phi] : attr.per_token) {
            Acc& a = acc[token];
            a.sum_abs += std::fabs(phi);
            a.sum_signed += phi;
            ++a.count;
        }
    }
    FeatureRanking ranking;
    ranking.entries.reserve(acc.size());
    for (const auto& [token, a] : acc) {
        RankedFeature f;
        f.token = token;
        f.mean_abs = a.sum_abs / static_cast<double>(a.count);
        f.signed_mean = a.sum_signed / static_cast<double>(a.count);
        double oriented = f.signed_mean * static_cast<double>(male_sign);
        f.direction = oriented > 0.0   ? LeanDirection::MaleLeaning
                      : oriented < 0.0 ? LeanDirection::FemaleLeaning
                                       : LeanDirection::Ambiguous;
        ranking.entries.push_back(std::move(f));
    }
    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const RankedFeature& a, const RankedFeature& b) {
                  if (a.mean_abs != b.mean_abs) return a.mean_abs > b.mean_abs;
                  return a.token < b.token;
              });
    return ranking;
}

Lexicon top_k_tokens(const FeatureRanking& ranking, size_t k) {
    if (k < 1) throw UsageError("top_k_tokens: k must be >= 1");
    size_t take = std::min(k, ranking.entries.size());
    std::vector<std::string> entries;
    entries.reserve(take);
    for (size_t i = 0; i < take; ++i) entries.push_back(ranking.entries[i].token);
    return Lexicon::from_entries("top_" + std::to_string(k), entries);
}

void save_ranking(const FeatureRanking& ranking, const std::string& path) {
    std::ostringstream out;
    out << "token,mean_abs,signed_mean,direction\n";
    for (const RankedFeature& f : ranking.entries) {
        out << f.token << ',' << format_double(f.mean_abs) << ',' << format_double(f.signed_mean)
            << ',' << to_string(f.direction) << '\n';
    }
    write_file(path, out.str());
}

FeatureRanking load_ranking(const std::string& path) {
    std::string text = read_file(path);
    std::vector<std::string> lines = split(text, '\n');
    if (lines.empty() || trim(lines[0]) != "token,mean_abs,signed_mean,direction") {
        throw DataError("ranking file missing header: " + path);
    }
    FeatureRanking ranking;
    for (size_t i = 1; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty()) continue;
        std::vector<std::string> cols = split(line, ',');
        if (cols.size() != 4) {
            throw DataError("ranking file line " + std::to_string(i + 1) + ": expected 4 columns");
        }
        RankedFeature f;
        f.token = cols[0];
        f.mean_abs = std::stod(cols[1]);
        f.signed_mean = std::stod(cols[2]);
        f.direction = lean_direction_from_string(cols[3]);
        ranking.entries.push_back(std::move(f));
    }
    return ranking;
}

}  // namespace degender
