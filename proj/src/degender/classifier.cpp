#include "degender/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "json.hpp"

#include "degender/errors.hpp"
#include "degender/evaluation.hpp"
#include "degender/rng.hpp"
#include "degender/util.hpp"

namespace degender {

using nlohmann::json;

TfIdfVectorizer TfIdfVectorizer::fit(std::span<const TokenStream> docs, size_t min_df,
                                     size_t max_vocab) {
    if (docs.empty()) throw UsageError("fit_tfidf: no documents");
    std::map<std::string, uint32_t> df;
    std::map<std::string, size_t> last_doc;
    size_t doc_no = 0;
    for (const TokenStream& doc : docs) {
        ++doc_no;
        for (const std::string& token : doc.tokens) {
            if (token == kDeletedMarker) continue;
            size_t& last = last_doc[token];
            if (last != doc_no) {
                last = doc_no;
                ++df[token];
            }
        }
    }

    std::vector<std::pair<std::string, uint32_t>> kept;
    for (const auto& [token, count] : df) {
        if (count >= min_df) kept.emplace_back(token, count);
    }
    if (kept.size() > max_vocab) {
        // keep the most frequent, then restore lexicographic order
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        kept.resize(max_vocab);
        std::sort(kept.begin(), kept.end());
    }
    if (kept.empty()) throw DataError("fit_tfidf: empty vocabulary");

    TfIdfVectorizer v;
    v.n_docs_ = docs.size();
    v.tokens_.reserve(kept.size());
    v.doc_freq_.reserve(kept.size());
    for (auto& [token, count] : kept) {
        v.index_[token] = static_cast<uint32_t>(v.tokens_.size());
        v.tokens_.push_back(std::move(token));
        v.doc_freq_.push_back(count);
    }
    return v;
}

std::optional<uint32_t> TfIdfVectorizer::index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double TfIdfVectorizer::idf(uint32_t index) const {
    return std::log((1.0 + static_cast<double>(n_docs_)) /
                    (1.0 + static_cast<double>(doc_freq_[index]))) +
           1.0;
}

SparseVector TfIdfVectorizer::transform(const TokenStream& doc) const {
    std::map<uint32_t, double> counts;
    for (const std::string& token : doc.tokens) {
        auto it = index_.find(token);
        if (it != index_.end()) counts[it->second] += 1.0;
    }
    SparseVector out;
    out.reserve(counts.size());
    double norm_sq = 0.0;
    for (const auto& [index, count] : counts) {
        double value = count * idf(index);
        out.push_back({index, value});
        norm_sq += value * value;
    }
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (SparseFeature& f : out) f.value *= inv;
    }
    return out;
}

TfIdfVectorizer TfIdfVectorizer::from_parts(std::vector<std::string> tokens,
                                            std::vector<uint32_t> doc_freq, size_t n_docs) {
    if (tokens.size() != doc_freq.size()) {
        throw DataError("tfidf model: vocabulary and doc_freq sizes differ");
    }
    TfIdfVectorizer v;
    v.tokens_ = std::move(tokens);
    v.doc_freq_ = std::move(doc_freq);
    v.n_docs_ = n_docs;
    for (size_t i = 0; i < v.tokens_.size(); ++i) {
        if (!v.index_.emplace(v.tokens_[i], static_cast<uint32_t>(i)).second) {
            throw DataError("tfidf model: duplicate vocabulary token \"" + v.tokens_[i] + "\"");
        }
    }
    return v;
}

namespace {

double stable_sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow
double log1pexp(double t) {
    if (t > 35.0) return t;
    if (t < -35.0) return std::exp(t);
    return std::log1p(std::exp(t));
}

double sparse_dot(const SparseVector& x, std::span<const double> w) {
    double z = 0.0;
    for (const SparseFeature& f : x) z += w[f.index] * f.value;
    return z;
}

double l1_norm(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += std::fabs(v);
    return s;
}

}  // namespace

double logistic_smooth_value(std::span<const SparseVector> X, std::span<const int> y,
                             std::span<const double> w, double b, double alpha,
                             double mixing_lambda) {
    const double n = static_cast<double>(X.size());
    double loss = 0.0;
    for (size_t i = 0; i < X.size(); ++i) {
        double z = sparse_dot(X[i], w) + b;
        double margin = (y[i] != 0 ? z : -z);
        loss += log1pexp(-margin);
    }
    loss /= n;
    double l2 = 0.0;
    for (double v : w) l2 += v * v;
    return loss + 0.5 * alpha * (1.0 - mixing_lambda) * l2;
}

SmoothEval logistic_smooth_eval(std::span<const SparseVector> X, std::span<const int> y,
                                std::span<const double> w, double b, size_t dim,
                                double alpha, double mixing_lambda) {
    const double n = static_cast<double>(X.size());
    SmoothEval eval;
    eval.grad_w.assign(dim, 0.0);
    double loss = 0.0;
    double grad_b = 0.0;
    for (size_t i = 0; i < X.size(); ++i) {
        double z = sparse_dot(X[i], w) + b;
        double margin = (y[i] != 0 ? z : -z);
        loss += log1pexp(-margin);
        double residual = stable_sigmoid(z) - (y[i] != 0 ? 1.0 : 0.0);
        grad_b += residual;
        for (const SparseFeature& f : X[i]) eval.grad_w[f.index] += residual * f.value;
    }
    double l2 = 0.0;
    for (size_t j = 0; j < dim; ++j) {
        eval.grad_w[j] = eval.grad_w[j] / n + alpha * (1.0 - mixing_lambda) * w[j];
        l2 += w[j] * w[j];
    }
    eval.value = loss / n + 0.5 * alpha * (1.0 - mixing_lambda) * l2;
    eval.grad_b = grad_b / n;
    return eval;
}

LinearModel train_logistic(std::span<const SparseVector> X, std::span<const int> y,
                           size_t dim, const TrainConfig& cfg, TrainTrace* trace) {
    if (X.size() != y.size()) throw UsageError("train_logistic: X and y sizes differ");
    if (X.size() < 2) throw UsageError("train_logistic: need at least 2 examples");
    if (cfg.alpha < 0.0) throw UsageError("train_logistic: alpha must be >= 0");
    if (cfg.mixing_lambda < 0.0 || cfg.mixing_lambda > 1.0) {
        throw UsageError("train_logistic: mixing_lambda must be in [0, 1]");
    }
    bool has_pos = false, has_neg = false;
    for (int label : y) (label != 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw DataError("train_logistic: labels contain a single class");
    }
    for (const SparseVector& x : X) {
        for (const SparseFeature& f : x) {
            if (f.index >= dim) throw UsageError("train_logistic: feature index out of range");
        }
    }

    const double l1_strength = cfg.alpha * cfg.mixing_lambda;
    std::vector<double> w(dim, 0.0);
    double b = 0.0;

    SmoothEval eval = logistic_smooth_eval(X, y, w, b, dim, cfg.alpha, cfg.mixing_lambda);
    double objective = eval.value + l1_strength * l1_norm(w);
    if (trace) {
        trace->objective.clear();
        trace->converged = false;
    }

    double step = 1.0;
    std::vector<double> w_next(dim, 0.0);
    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        bool accepted = false;
        double b_next = b;
        double smooth_next = 0.0;
        for (int halvings = 0; halvings < 60; ++halvings) {
            double thresh = step * l1_strength;
            for (size_t j = 0; j < dim; ++j) {
                double target = w[j] - step * eval.grad_w[j];
                if (target > thresh) {
                    w_next[j] = target - thresh;
                } else if (target < -thresh) {
                    w_next[j] = target + thresh;
                } else {
                    w_next[j] = 0.0;
                }
            }
            b_next = b - step * eval.grad_b;
            smooth_next =
                logistic_smooth_value(X, y, w_next, b_next, cfg.alpha, cfg.mixing_lambda);
            double linear = 0.0;
            double dist_sq = 0.0;
            for (size_t j = 0; j < dim; ++j) {
                double d = w_next[j] - w[j];
                linear += eval.grad_w[j] * d;
                dist_sq += d * d;
            }
            double db = b_next - b;
            linear += eval.grad_b * db;
            dist_sq += db * db;
            double bound = eval.value + linear + dist_sq / (2.0 * step);
            if (smooth_next <= bound + 1e-12 * (1.0 + std::fabs(eval.value))) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        double objective_next = smooth_next + l1_strength * l1_norm(w_next);
        if (objective_next > objective) {
            // numerical convergence: a further step cannot decrease the
            // objective in floating point, so keep the current iterate
            if (trace) trace->converged = true;
            break;
        }
        double decrease = objective - objective_next;
        std::swap(w, w_next);
        b = b_next;
        objective = objective_next;
        if (trace) trace->objective.push_back(objective_next);
        eval = logistic_smooth_eval(X, y, w, b, dim, cfg.alpha, cfg.mixing_lambda);
        step *= 1.2;
        if (decrease < cfg.tolerance * std::max(1.0, std::fabs(objective))) {
            if (trace) trace->converged = true;
            ++iter;
            break;
        }
    }
    if (trace) trace->iters = iter;

    LinearModel model;
    model.weights = std::move(w);
    model.bias = b;
    model.feature_space = FeatureSpace::TfIdf;
    return model;
}

double decision_value(const LinearModel& model, const SparseVector& x) {
    for (const SparseFeature& f : x) {
        if (f.index >= model.weights.size()) {
            throw UsageError("predict: feature index out of range for model");
        }
    }
    return sparse_dot(x, model.weights) + model.bias;
}

double predict_proba(const LinearModel& model, const SparseVector& x) {
    return stable_sigmoid(decision_value(model, x));
}

double predict_proba_dense(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.weights.size()) {
        throw UsageError("predict: dense feature length does not match model");
    }
    double z = model.bias;
    for (size_t j = 0; j < x.size(); ++j) z += model.weights[j] * x[j];
    return stable_sigmoid(z);
}

SplitResult split_indices(size_t n, const SplitSpec& spec) {
    if (spec.train_fraction < 0.0 || spec.eval_fraction < 0.0 || spec.test_fraction < 0.0 ||
        std::fabs(spec.train_fraction + spec.eval_fraction + spec.test_fraction - 1.0) > 1e-9) {
        throw UsageError("split: fractions must be non-negative and sum to 1");
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(spec.seed);
    rng.shuffle(order);
    size_t n_train = static_cast<size_t>(spec.train_fraction * static_cast<double>(n));
    size_t n_eval = static_cast<size_t>(spec.eval_fraction * static_cast<double>(n));
    n_train = std::min(n_train, n);
    n_eval = std::min(n_eval, n - n_train);
    SplitResult result;
    result.train.assign(order.begin(), order.begin() + static_cast<ptrdiff_t>(n_train));
    result.eval.assign(order.begin() + static_cast<ptrdiff_t>(n_train),
                       order.begin() + static_cast<ptrdiff_t>(n_train + n_eval));
    result.test.assign(order.begin() + static_cast<ptrdiff_t>(n_train + n_eval), order.end());
    return result;
}

AlphaSelection select_alpha(std::span<const double> candidates,
                            std::span<const SparseVector> X_train, std::span<const int> y_train,
                            std::span<const SparseVector> X_eval, std::span<const int> y_eval,
                            size_t dim, TrainConfig base) {
    if (candidates.empty()) throw UsageError("select_alpha: no candidates");
    if (X_eval.empty()) throw UsageError("select_alpha: eval slice is empty");
    std::vector<double> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());

    AlphaSelection best;
    bool have_best = false;
    for (double alpha : sorted) {
        TrainConfig cfg = base;
        cfg.alpha = alpha;
        LinearModel model = train_logistic(X_train, y_train, dim, cfg);
        std::vector<double> scores;
        scores.reserve(X_eval.size());
        for (const SparseVector& x : X_eval) scores.push_back(predict_proba(model, x));
        double score = auroc(scores, y_eval);
        if (!have_best || score > best.eval_auroc) {
            best.alpha = alpha;
            best.model = std::move(model);
            best.eval_auroc = score;
            have_best = true;
        }
    }
    return best;
}

namespace {

json train_config_to_json(const TrainConfig& cfg) {
    return json{{"alpha", cfg.alpha},
                {"mixing_lambda", cfg.mixing_lambda},
                {"max_iters", cfg.max_iters},
                {"tolerance", cfg.tolerance}};
}

TrainConfig train_config_from_json(const json& obj) {
    TrainConfig cfg;
    cfg.alpha = obj.at("alpha").get<double>();
    cfg.mixing_lambda = obj.at("mixing_lambda").get<double>();
    cfg.max_iters = obj.at("max_iters").get<int>();
    cfg.tolerance = obj.at("tolerance").get<double>();
    return cfg;
}

}  // namespace

void save_model(const ModelBundle& bundle, const std::string& path) {
    json obj;
    obj["weights"] = bundle.model.weights;
    obj["bias"] = bundle.model.bias;
    obj["train_config"] = train_config_to_json(bundle.config);
    if (bundle.feature_space == FeatureSpace::TfIdf) {
        obj["feature_space"] = "tfidf";
        obj["vocabulary"] = bundle.vectorizer.tokens();
        obj["doc_freq"] = bundle.vectorizer.doc_freq();
        obj["n_docs"] = bundle.vectorizer.n_docs();
    } else {
        obj["feature_space"] = "embedding";
        obj["dim"] = bundle.dim;
    }
    write_file(path, obj.dump(2) + "\n");
}

ModelBundle load_model(const std::string& path) {
    json obj;
    try {
        obj = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw DataError("model file " + path + ": invalid JSON: " + e.what());
    }
    ModelBundle bundle;
    try {
        std::string space = obj.at("feature_space").get<std::string>();
        bundle.model.weights = obj.at("weights").get<std::vector<double>>();
        bundle.model.bias = obj.at("bias").get<double>();
        bundle.config = train_config_from_json(obj.at("train_config"));
        if (space == "tfidf") {
            bundle.feature_space = FeatureSpace::TfIdf;
            bundle.vectorizer = TfIdfVectorizer::from_parts(
                obj.at("vocabulary").get<std::vector<std::string>>(),
                obj.at("doc_freq").get<std::vector<uint32_t>>(),
                obj.at("n_docs").get<size_t>());
            if (bundle.model.weights.size() != bundle.vectorizer.vocab_size()) {
                throw DataError("model file " + path + ": weight/vocabulary size mismatch");
            }
        } else if (space == "embedding") {
            bundle.feature_space = FeatureSpace::Embedding;
            bundle.dim = obj.at("dim").get<size_t>();
            bundle.model.feature_space = FeatureSpace::Embedding;
            if (bundle.model.weights.size() != bundle.dim) {
                throw DataError("model file " + path + ": weight/dim mismatch");
            }
        } else {
            throw DataError("model file " + path + ": unknown feature_space \"" + space + "\"");
        }
    } catch (const json::exception& e) {
        throw DataError("model file " + path + ": " + e.what());
    }
    return bundle;
}

}  // namespace degender
