#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "degender/lexicon.hpp"
#include "degender/tokenizer.hpp"

namespace degender {

struct EmbeddingConfig {
    size_t dim = 100;
    size_t window = 5;
    size_t n_negative = 5;
    size_t epochs = 5;
    size_t min_count = 5;
    double subsample_threshold = 1e-3;
    double initial_lr = 0.025;
    uint64_t seed = 1;
};

class EmbeddingModel {
public:
    EmbeddingModel() = default;
    EmbeddingModel(std::vector<std::string> tokens, size_t dim, std::vector<double> data);

    size_t dim() const { return dim_; }
    size_t vocab_size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }
    std::optional<uint32_t> index_of(const std::string& token) const;

    std::span<const double> vector_at(uint32_t index) const {
        return {data_.data() + static_cast<size_t>(index) * dim_, dim_};
    }
    std::span<double> mutable_vector(uint32_t index) {
        return {data_.data() + static_cast<size_t>(index) * dim_, dim_};
    }

private:
    std::vector<std::string> tokens_;
    std::map<std::string, uint32_t> index_;
    size_t dim_ = 0;
    std::vector<double> data_;  // row-major, one row per token
};

// Skip-gram with negative sampling; single-threaded and deterministic given
// the seed. Tokens under min_count and the [DEL] marker are excluded.
EmbeddingModel train_skipgram(std::span<const TokenStream> corpus, const EmbeddingConfig& cfg);

struct ResumeVector {
    std::string resume_id;
    std::vector<double> vector;
    size_t n_keywords = 0;  // skill-token occurrences averaged; 0 flags a zero vector

    bool flagged() const { return n_keywords == 0; }
};

// Mean vector of the resume's in-vocabulary skill-lexicon tokens
// (occurrence-weighted). Only single-token lexicon entries participate.
ResumeVector resume_vector(const std::string& resume_id, const TokenStream& tokens,
                           const EmbeddingModel& model, const Lexicon& skills);

// Standard cosine; zero-length input pairs are rejected, a zero vector on
// either side yields 0 (treated as below any matching threshold).
double cosine(std::span<const double> a, std::span<const double> b);

struct GenderDirection {
    std::vector<double> direction;  // unit norm
    std::vector<std::pair<std::string, std::string>> definitional_pairs;  // usable pairs
};

// Principal direction of the centered per-pair difference vectors; with one
// usable pair this is just the normalized difference (first minus second).
GenderDirection gender_direction(const EmbeddingModel& model,
                                 std::span<const std::pair<std::string, std::string>> pairs);

struct DebiasResult {
    EmbeddingModel model;
    std::vector<std::string> flagged;  // near-zero residual, left unnormalized
};

// Neutralize step: project the gender direction out of every non-protected
// vector and restore its original norm.
DebiasResult hard_debias(const EmbeddingModel& model, const GenderDirection& direction,
                         const std::set<std::string>& protected_tokens);

// Text vector file: first line "N dim", then token followed by dim decimals.
void save_vectors(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_vectors(const std::string& path);

// One pair per line, female term first, '#' comments ignored.
std::vector<std::pair<std::string, std::string>> load_definitional_pairs(
    const std::string& path);

// All-token mean vector used by the embedding-feature gender classifier;
// out-of-vocabulary tokens and [DEL] are skipped, empty docs give zero.
std::vector<double> mean_token_vector(const TokenStream& tokens, const EmbeddingModel& model);

}  // namespace degender
