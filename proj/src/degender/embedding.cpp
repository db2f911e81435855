#include "degender/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degender/errors.hpp"
#include "degender/rng.hpp"
#include "degender/util.hpp"

namespace degender {

EmbeddingModel::EmbeddingModel(std::vector<std::string> tokens, size_t dim,
                               std::vector<double> data)
    : tokens_(std::move(tokens)), dim_(dim), data_(std::move(data)) {
    if (data_.size() != tokens_.size() * dim_) {
        throw DataError("embedding model: data size does not match vocab and dim");
    }
    for (size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], static_cast<uint32_t>(i)).second) {
            throw DataError("embedding model: duplicate token \"" + tokens_[i] + "\"");
        }
    }
}

std::optional<uint32_t> EmbeddingModel::index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

EmbeddingModel train_skipgram(std::span<const TokenStream> corpus, const EmbeddingConfig& cfg) {
    if (corpus.empty()) throw UsageError("train_skipgram: corpus is empty");
    if (cfg.dim < 2) throw UsageError("train_skipgram: dim must be >= 2");
    if (cfg.window < 1) throw UsageError("train_skipgram: window must be >= 1");

    std::map<std::string, uint64_t> counts;
    uint64_t total_tokens = 0;
    for (const TokenStream& doc : corpus) {
        for (const std::string& token : doc.tokens) {
            if (token == kDeletedMarker) continue;
            ++counts[token];
            ++total_tokens;
        }
    }
    std::vector<std::pair<std::string, uint64_t>> vocab_counts;
    for (const auto& [token, count] : counts) {
        if (count >= cfg.min_count) vocab_counts.emplace_back(token, count);
    }
    if (vocab_counts.empty()) throw DataError("train_skipgram: empty effective vocabulary");
    std::sort(vocab_counts.begin(), vocab_counts.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    const size_t vocab_size = vocab_counts.size();
    std::map<std::string, uint32_t> index;
    std::vector<std::string> tokens(vocab_size);
    std::vector<uint64_t> freq(vocab_size);
    for (size_t i = 0; i < vocab_size; ++i) {
        tokens[i] = vocab_counts[i].first;
        freq[i] = vocab_counts[i].second;
        index[tokens[i]] = static_cast<uint32_t>(i);
    }

    // unigram^0.75 negative-sampling table
    const size_t table_size = 1u << 20;
    std::vector<uint32_t> table(table_size);
    {
        double total_pow = 0.0;
        for (uint64_t f : freq) total_pow += std::pow(static_cast<double>(f), 0.75);
        size_t word = 0;
        double cumulative = std::pow(static_cast<double>(freq[0]), 0.75) / total_pow;
        for (size_t i = 0; i < table_size; ++i) {
            table[i] = static_cast<uint32_t>(word);
            if (static_cast<double>(i + 1) / static_cast<double>(table_size) > cumulative &&
                word + 1 < vocab_size) {
                ++word;
                cumulative += std::pow(static_cast<double>(freq[word]), 0.75) / total_pow;
            }
        }
    }

    Rng rng(cfg.seed);
    std::vector<double> syn0(vocab_size * cfg.dim);
    for (double& v : syn0) v = (rng.uniform01() - 0.5) / static_cast<double>(cfg.dim);
    std::vector<double> syn1(vocab_size * cfg.dim, 0.0);

    // pre-resolved documents; subsampling is redrawn every epoch
    std::vector<std::vector<uint32_t>> docs_ids(corpus.size());
    for (size_t d = 0; d < corpus.size(); ++d) {
        docs_ids[d].reserve(corpus[d].size());
        for (const std::string& token : corpus[d].tokens) {
            auto it = index.find(token);
            if (it != index.end()) docs_ids[d].push_back(it->second);
        }
    }

    const double total_steps =
        static_cast<double>(cfg.epochs) * static_cast<double>(std::max<uint64_t>(total_tokens, 1));
    uint64_t processed = 0;
    std::vector<uint32_t> sentence;
    std::vector<double> grad_center(cfg.dim);
    const double t = cfg.subsample_threshold;

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const std::vector<uint32_t>& doc : docs_ids) {
            sentence.clear();
            for (uint32_t id : doc) {
                if (t > 0.0) {
                    double f = static_cast<double>(freq[id]) / static_cast<double>(total_tokens);
                    double keep = (std::sqrt(f / t) + 1.0) * (t / f);
                    if (keep < 1.0 && rng.uniform01() > keep) continue;
                }
                sentence.push_back(id);
            }
            const size_t len = sentence.size();
            for (size_t pos = 0; pos < len; ++pos) {
                ++processed;
                double lr = cfg.initial_lr *
                            std::max(1e-4, 1.0 - static_cast<double>(processed) / total_steps);
                size_t shrink = rng.uniform_index(cfg.window);
                size_t span = cfg.window - shrink;
                size_t lo = pos >= span ? pos - span : 0;
                size_t hi = std::min(len, pos + span + 1);
                uint32_t center = sentence[pos];
                double* center_vec = syn0.data() + static_cast<size_t>(center) * cfg.dim;
                for (size_t c = lo; c < hi; ++c) {
                    if (c == pos) continue;
                    uint32_t context = sentence[c];
                    std::fill(grad_center.begin(), grad_center.end(), 0.0);
                    for (size_t k = 0; k <= cfg.n_negative; ++k) {
                        uint32_t target;
                        double label;
                        if (k == 0) {
                            target = context;
                            label = 1.0;
                        } else {
                            target = table[rng.uniform_index(table_size)];
                            if (target == context) continue;
                            label = 0.0;
                        }
                        double* target_vec =
                            syn1.data() + static_cast<size_t>(target) * cfg.dim;
                        double dot = 0.0;
                        for (size_t j = 0; j < cfg.dim; ++j) dot += center_vec[j] * target_vec[j];
                        double pred = 1.0 / (1.0 + std::exp(-dot));
                        double g = (label - pred) * lr;
                        for (size_t j = 0; j < cfg.dim; ++j) {
                            grad_center[j] += g * target_vec[j];
                            target_vec[j] += g * center_vec[j];
                        }
                    }
                    for (size_t j = 0; j < cfg.dim; ++j) center_vec[j] += grad_center[j];
                }
            }
        }
    }
    return EmbeddingModel(std::move(tokens), cfg.dim, std::move(syn0));
}

ResumeVector resume_vector(const std::string& resume_id, const TokenStream& tokens,
                           const EmbeddingModel& model, const Lexicon& skills) {
    ResumeVector out;
    out.resume_id = resume_id;
    out.vector.assign(model.dim(), 0.0);
    for (const std::string& token : tokens.tokens) {
        if (!skills.contains_token(token)) continue;
        auto idx = model.index_of(token);
        if (!idx) continue;
        std::span<const double> v = model.vector_at(*idx);
        for (size_t j = 0; j < model.dim(); ++j) out.vector[j] += v[j];
        ++out.n_keywords;
    }
    if (out.n_keywords > 0) {
        double inv = 1.0 / static_cast<double>(out.n_keywords);
        for (double& v : out.vector) v *= inv;
    }
    return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw UsageError("cosine: vectors differ in length");
    if (a.empty()) throw UsageError("cosine: empty vectors");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void normalize_in_place(std::vector<double>& v) {
    double n = norm(v);
    if (n == 0.0) throw DataError("gender_direction: degenerate zero difference");
    for (double& x : v) x /= n;
}

}  // namespace

GenderDirection gender_direction(const EmbeddingModel& model,
                                 std::span<const std::pair<std::string, std::string>> pairs) {
    const size_t dim = model.dim();
    std::vector<std::vector<double>> diffs;
    GenderDirection out;
    for (const auto& [first, second] : pairs) {
        auto a = model.index_of(first);
        auto b = model.index_of(second);
        if (!a || !b) continue;
        std::span<const double> va = model.vector_at(*a);
        std::span<const double> vb = model.vector_at(*b);
        std::vector<double> diff(dim);
        for (size_t j = 0; j < dim; ++j) diff[j] = va[j] - vb[j];
        diffs.push_back(std::move(diff));
        out.definitional_pairs.emplace_back(first, second);
    }
    if (diffs.empty()) {
        throw DataError("gender_direction: no definitional pair has both tokens in the vocabulary");
    }

    std::vector<double> mean(dim, 0.0);
    for (const auto& diff : diffs) {
        for (size_t j = 0; j < dim; ++j) mean[j] += diff[j];
    }
    for (double& v : mean) v /= static_cast<double>(diffs.size());

    if (diffs.size() == 1) {
        out.direction = diffs[0];
        normalize_in_place(out.direction);
        return out;
    }

    std::vector<std::vector<double>> centered = diffs;
    double centered_scale = 0.0;
    for (auto& row : centered) {
        for (size_t j = 0; j < dim; ++j) row[j] -= mean[j];
        centered_scale = std::max(centered_scale, norm(row));
    }
    if (centered_scale < 1e-12) {
        // all differences equal: the principal direction is the shared one
        out.direction = mean;
        normalize_in_place(out.direction);
        return out;
    }

    // power iteration on the covariance of the centered differences
    std::vector<double> v(dim, 0.0);
    {
        size_t best = 0;
        for (size_t r = 1; r < centered.size(); ++r) {
            if (norm(centered[r]) > norm(centered[best])) best = r;
        }
        v = centered[best];
        normalize_in_place(v);
    }
    std::vector<double> next(dim);
    for (int iter = 0; iter < 2000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (const auto& row : centered) {
            double proj = 0.0;
            for (size_t j = 0; j < dim; ++j) proj += row[j] * v[j];
            for (size_t j = 0; j < dim; ++j) next[j] += proj * row[j];
        }
        double n = norm(next);
        if (n == 0.0) break;
        double drift = 0.0;
        for (size_t j = 0; j < dim; ++j) {
            next[j] /= n;
            drift = std::max(drift, std::fabs(std::fabs(next[j]) - std::fabs(v[j])));
        }
        v = next;
        if (drift < 1e-15 && iter > 4) break;
    }
    // orient along the mean difference so the sign is reproducible
    double align = 0.0;
    for (size_t j = 0; j < dim; ++j) align += v[j] * mean[j];
    if (align < 0.0) {
        for (double& x : v) x = -x;
    }
    out.direction = std::move(v);
    normalize_in_place(out.direction);
    return out;
}

DebiasResult hard_debias(const EmbeddingModel& model, const GenderDirection& direction,
                         const std::set<std::string>& protected_tokens) {
    if (direction.direction.size() != model.dim()) {
        throw UsageError("hard_debias: direction dimension does not match the model");
    }
    std::vector<double> g = direction.direction;
    double gn = norm(g);
    if (gn == 0.0) throw UsageError("hard_debias: zero direction");
    for (double& x : g) x /= gn;

    DebiasResult result;
    result.model = model;
    for (uint32_t i = 0; i < model.vocab_size(); ++i) {
        const std::string& token = model.tokens()[i];
        if (protected_tokens.count(token)) continue;
        std::span<double> v = result.model.mutable_vector(i);
        double original_norm = norm(v);
        double proj = 0.0;
        for (size_t j = 0; j < v.size(); ++j) proj += v[j] * g[j];
        for (size_t j = 0; j < v.size(); ++j) v[j] -= proj * g[j];
        double residual_norm = norm(v);
        if (residual_norm < 1e-9) {
            result.flagged.push_back(token);
            continue;
        }
        double scale = original_norm / residual_norm;
        for (size_t j = 0; j < v.size(); ++j) v[j] *= scale;
    }
    return result;
}

void save_vectors(const EmbeddingModel& model, const std::string& path) {
    std::ostringstream out;
    out << model.vocab_size() << ' ' << model.dim() << '\n';
    for (uint32_t i = 0; i < model.vocab_size(); ++i) {
        out << model.tokens()[i];
        for (double v : model.vector_at(i)) out << ' ' << format_double(v);
        out << '\n';
    }
    write_file(path, out.str());
}

EmbeddingModel load_vectors(const std::string& path) {
    std::string text = read_file(path);
    std::vector<std::string> lines = split(text, '\n');
    if (lines.empty()) throw DataError("vector file " + path + ": empty");
    std::istringstream header(lines[0]);
    size_t count = 0, dim = 0;
    if (!(header >> count >> dim) || dim == 0) {
        throw DataError("vector file " + path + ": bad header line");
    }
    std::vector<std::string> tokens;
    std::vector<double> data;
    tokens.reserve(count);
    data.reserve(count * dim);
    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        std::istringstream row(lines[i]);
        std::string token;
        if (!(row >> token)) {
            throw DataError("vector file " + path + ": line " + std::to_string(i + 1) +
                            ": missing token");
        }
        tokens.push_back(token);
        for (size_t j = 0; j < dim; ++j) {
            double v = 0.0;
            if (!(row >> v)) {
                throw DataError("vector file " + path + ": line " + std::to_string(i + 1) +
                                ": expected " + std::to_string(dim) + " values");
            }
            data.push_back(v);
        }
    }
    if (tokens.size() != count) {
        throw DataError("vector file " + path + ": header declares " + std::to_string(count) +
                        " rows, found " + std::to_string(tokens.size()));
    }
    return EmbeddingModel(std::move(tokens), dim, std::move(data));
}

std::vector<std::pair<std::string, std::string>> load_definitional_pairs(
    const std::string& path) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const std::string& line : read_wordlist(path)) {
        std::istringstream row(line);
        std::string first, second;
        if (!(row >> first >> second)) {
            throw DataError("definitional pairs file " + path + ": bad line \"" + line + "\"");
        }
        pairs.emplace_back(first, second);
    }
    if (pairs.empty()) throw DataError("definitional pairs file " + path + ": no pairs");
    return pairs;
}

std::vector<double> mean_token_vector(const TokenStream& tokens, const EmbeddingModel& model) {
    std::vector<double> out(model.dim(), 0.0);
    size_t n = 0;
    for (const std::string& token : tokens.tokens) {
        if (token == kDeletedMarker) continue;
        auto idx = model.index_of(token);
        if (!idx) continue;
        std::span<const double> v = model.vector_at(*idx);
        for (size_t j = 0; j < model.dim(); ++j) out[j] += v[j];
        ++n;
    }
    if (n > 0) {
        for (double& v : out) v /= static_cast<double>(n);
    }
    return out;
}

}  // namespace degender
