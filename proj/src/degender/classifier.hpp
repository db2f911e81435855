#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "degender/tokenizer.hpp"

namespace degender {

struct SparseFeature {
    uint32_t index = 0;
    double value = 0.0;
};
// strictly increasing indices
using SparseVector = std::vector<SparseFeature>;

// Smoothed idf with raw term counts and L2 row normalization:
//   idf(t) = ln((1 + n_docs) / (1 + doc_freq[t])) + 1
// The [DEL] marker never enters the vocabulary.
class TfIdfVectorizer {
public:
    TfIdfVectorizer() = default;

    static TfIdfVectorizer fit(std::span<const TokenStream> docs, size_t min_df = 5,
                               size_t max_vocab = 200000);

    SparseVector transform(const TokenStream& doc) const;

    size_t vocab_size() const { return tokens_.size(); }
    size_t n_docs() const { return n_docs_; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<uint32_t>& doc_freq() const { return doc_freq_; }
    std::optional<uint32_t> index_of(const std::string& token) const;
    double idf(uint32_t index) const;

    static TfIdfVectorizer from_parts(std::vector<std::string> tokens,
                                      std::vector<uint32_t> doc_freq, size_t n_docs);

private:
    std::vector<std::string> tokens_;  // lexicographic order
    std::map<std::string, uint32_t> index_;
    std::vector<uint32_t> doc_freq_;
    size_t n_docs_ = 0;
};

enum class FeatureSpace { TfIdf, Embedding };

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    FeatureSpace feature_space = FeatureSpace::TfIdf;
};

struct TrainConfig {
    double alpha = 1e-4;          // overall elastic-net strength
    double mixing_lambda = 0.5;   // 1 = pure L1, 0 = pure L2
    int max_iters = 300;
    double tolerance = 1e-7;      // relative objective decrease
};

// Value and gradient of the smooth objective part: mean logistic loss plus
// the L2 half of the elastic net. The L1 term is handled by the proximal
// step and excluded here so the gradient is finite-difference checkable.
struct SmoothEval {
    double value = 0.0;
    std::vector<double> grad_w;
    double grad_b = 0.0;
};
SmoothEval logistic_smooth_eval(std::span<const SparseVector> X, std::span<const int> y,
                                std::span<const double> w, double b, size_t dim,
                                double alpha, double mixing_lambda);
double logistic_smooth_value(std::span<const SparseVector> X, std::span<const int> y,
                             std::span<const double> w, double b, double alpha,
                             double mixing_lambda);

struct TrainTrace {
    std::vector<double> objective;  // full objective after every iteration
    int iters = 0;
    bool converged = false;
};

// Full-batch proximal gradient with backtracking line search; soft
// thresholding produces exact zeros and the objective never increases.
LinearModel train_logistic(std::span<const SparseVector> X, std::span<const int> y,
                           size_t dim, const TrainConfig& cfg, TrainTrace* trace = nullptr);

double decision_value(const LinearModel& model, const SparseVector& x);
double predict_proba(const LinearModel& model, const SparseVector& x);
double predict_proba_dense(const LinearModel& model, std::span<const double> x);

struct SplitSpec {
    double train_fraction = 0.8;
    double eval_fraction = 0.1;
    double test_fraction = 0.1;
    uint64_t seed = 0;
};

struct SplitResult {
    std::vector<size_t> train;
    std::vector<size_t> eval;
    std::vector<size_t> test;
};

// Seeded shuffle then contiguous slices. Split pair indices (not resume ids)
// when both members of a matched pair must land in the same slice.
SplitResult split_indices(size_t n, const SplitSpec& spec);

struct AlphaSelection {
    double alpha = 0.0;
    LinearModel model;
    double eval_auroc = 0.0;
};

// Trains one model per candidate and keeps the best eval AUROC; ties go to
// the smallest alpha.
AlphaSelection select_alpha(std::span<const double> candidates,
                            std::span<const SparseVector> X_train, std::span<const int> y_train,
                            std::span<const SparseVector> X_eval, std::span<const int> y_eval,
                            size_t dim, TrainConfig base);

// Serialized model bundle: feature-space descriptor, vocabulary (tfidf) or
// dimension (embedding), weights, bias, and the training config echo.
struct ModelBundle {
    FeatureSpace feature_space = FeatureSpace::TfIdf;
    TfIdfVectorizer vectorizer;  // tfidf space only
    size_t dim = 0;              // embedding space only
    LinearModel model;
    TrainConfig config;
};

void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace degender
