#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "degender/classifier.hpp"
#include "degender/lexicon.hpp"
#include "degender/tokenizer.hpp"

namespace degender {

// Signed per-token contributions on the model's log-odds scale; positive
// pushes toward the male label by convention. per_token covers the tokens
// present in the document; the summed contribution of every absent
// vocabulary feature lands in absent_feature_offset so the efficiency
// identity sum(per_token) + offset == score(doc) - score(background) holds
// over the full feature space.
struct Attribution {
    std::string resume_id;
    std::map<std::string, double> per_token;
    double absent_feature_offset = 0.0;

    double total() const;
};

// Exact additive attribution for a linear model under an independent-feature
// baseline: phi_j = w_j * (x_j - background_mean_j).
class LinearAttributor {
public:
    LinearAttributor(const LinearModel& model, const TfIdfVectorizer& vectorizer,
                     std::vector<double> background_mean);

    Attribution attribute(const std::string& resume_id, const TokenStream& doc) const;
    // w . background + bias
    double background_score() const { return background_score_; }

private:
    const LinearModel& model_;
    const TfIdfVectorizer& vectorizer_;
    std::vector<double> background_;
    double w_dot_background_ = 0.0;
    double background_score_ = 0.0;
};

// Mean transformed vector over a document set (the standard background).
std::vector<double> mean_transformed(const TfIdfVectorizer& vectorizer,
                                     std::span<const SparseVector> X);

struct MaskingAttribution {
    Attribution attribution;
    std::map<std::string, double> stderr_per_token;
    size_t n_samples = 0;
};

// Monte-Carlo Shapley over token types: permutations of the document's
// distinct tokens are sampled and each token's contribution is the average
// score change when it is unmasked (masking replaces all its occurrences
// with [DEL]). Deterministic given the seed.
MaskingAttribution attribute_masking(const std::function<double(const TokenStream&)>& scorer,
                                     const std::string& resume_id, const TokenStream& doc,
                                     size_t n_samples, uint64_t seed);

enum class LeanDirection { MaleLeaning, FemaleLeaning, Ambiguous };
std::string to_string(LeanDirection d);
LeanDirection lean_direction_from_string(const std::string& s);

struct RankedFeature {
    std::string token;
    double mean_abs = 0.0;
    double signed_mean = 0.0;
    LeanDirection direction = LeanDirection::Ambiguous;
};

struct FeatureRanking {
    std::vector<RankedFeature> entries;  // descending mean_abs, ties by token
};

// Per token, over the attributions in which it appears: mean |phi| for the
// ranking and the signed mean for the direction label. male_sign flips the
// convention when the positive class is female.
FeatureRanking rank_features(std::span<const Attribution> attributions, int male_sign = 1);

Lexicon top_k_tokens(const FeatureRanking& ranking, size_t k);

// CSV with header token,mean_abs,signed_mean,direction; the token column is
// directly consumable as a token_list redaction pass.
void save_ranking(const FeatureRanking& ranking, const std::string& path);
FeatureRanking load_ranking(const std::string& path);

}  // namespace degender
