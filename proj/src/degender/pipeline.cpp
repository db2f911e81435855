#include "degender/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "degender/attribution.hpp"
#include "degender/classifier.hpp"
#include "degender/embedding.hpp"
#include "degender/errors.hpp"
#include "degender/evaluation.hpp"
#include "degender/manifest.hpp"
#include "degender/matching.hpp"
#include "degender/rng.hpp"
#include "degender/screening.hpp"
#include "degender/util.hpp"

namespace degender {

namespace {

namespace fs = std::filesystem;

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    if (jobs <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    size_t workers = std::min<size_t>(static_cast<size_t>(jobs), n);
    std::vector<std::thread> threads;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w]() {
            size_t lo = n * w / workers;
            size_t hi = n * (w + 1) / workers;
            try {
                for (size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (std::thread& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string bundled_path(const std::string& data_dir, const std::string& file) {
    return path_join(data_dir, file);
}

std::vector<std::string> name_list_paths(const Params& params) {
    std::string data_dir = resolve_data_dir(params);
    std::string male = params.get("male_names");
    std::string female = params.get("female_names");
    if (male.empty()) male = bundled_path(data_dir, "first_names_male.txt");
    if (female.empty()) female = bundled_path(data_dir, "first_names_female.txt");
    return {male, female};
}

std::string skills_path(const Params& params) {
    std::string path = params.get("skills");
    if (path.empty()) path = bundled_path(resolve_data_dir(params), "skills.txt");
    return path;
}

std::string definitional_pairs_path(const Params& params) {
    std::string path = params.get("definitional_pairs");
    if (path.empty()) path = bundled_path(resolve_data_dir(params), "definitional_pairs.txt");
    return path;
}

std::map<std::string, double> parse_odds(const std::string& spec) {
    if (spec == "default") return demo_token_odds();
    std::map<std::string, double> odds;
    if (spec == "none" || trim(spec).empty()) return odds;
    for (const std::string& raw : split(spec, ',')) {
        std::string item = trim(raw);
        if (item.empty()) continue;
        size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("odds: expected token=ratio, got \"" + item + "\"");
        }
        std::string token = trim(item.substr(0, eq));
        std::string value = trim(item.substr(eq + 1));
        double ratio = 0.0;
        if (value == "inf") {
            ratio = std::numeric_limits<double>::infinity();
        } else {
            try {
                size_t consumed = 0;
                ratio = std::stod(value, &consumed);
                if (consumed != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw UsageError("odds: bad ratio for token \"" + token + "\"");
            }
        }
        odds[token] = ratio;
    }
    return odds;
}

EmbeddingConfig embedding_config_from_params(const Params& params) {
    EmbeddingConfig cfg;
    cfg.dim = params.get_size("dim");
    cfg.window = params.get_size("window");
    cfg.n_negative = params.get_size("negatives");
    cfg.epochs = params.get_size("epochs");
    cfg.min_count = params.get_size("min_count");
    cfg.subsample_threshold = params.get_double("subsample");
    cfg.seed = derive_seed(params.get_u64("seed"), "embed");
    return cfg;
}

MatchConfig match_config_from_params(const Params& params) {
    MatchConfig cfg;
    cfg.max_experience_gap = static_cast<uint32_t>(params.get_size("max_experience_gap"));
    cfg.min_cosine = params.get_double("min_cosine");
    cfg.require_same_degree = params.get_bool("same_degree");
    cfg.require_same_field = params.get_bool("same_field");
    return cfg;
}

TrainConfig train_config_from_params(const Params& params) {
    TrainConfig cfg;
    cfg.mixing_lambda = params.get_double("lambda");
    cfg.max_iters = params.get_int("max_iters");
    cfg.tolerance = params.get_double("tolerance");
    return cfg;
}

std::vector<double> parse_alpha_grid(const std::string& spec) {
    std::vector<double> out;
    for (const std::string& raw : split(spec, ',')) {
        std::string item = trim(raw);
        if (item.empty()) continue;
        try {
            size_t consumed = 0;
            double v = std::stod(item, &consumed);
            if (consumed != item.size() || v < 0.0) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("alpha_grid: bad value \"" + item + "\"");
        }
    }
    if (out.empty()) throw UsageError("alpha_grid: no candidates");
    return out;
}

std::vector<size_t> resolve_grid(const std::string& spec, size_t ranking_len) {
    std::vector<size_t> ks;
    for (const std::string& raw : split(spec, ',')) {
        std::string item = trim(raw);
        if (item.empty()) continue;
        bool percent = !item.empty() && item.back() == '%';
        if (percent) item.pop_back();
        double v = 0.0;
        try {
            size_t consumed = 0;
            v = std::stod(item, &consumed);
            if (consumed != item.size() || v < 0.0) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("grid: bad value \"" + trim(raw) + "\"");
        }
        size_t k = percent ? static_cast<size_t>(
                                 std::llround(v / 100.0 * static_cast<double>(ranking_len)))
                           : static_cast<size_t>(std::llround(v));
        if (k > 0) ks.push_back(k);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

struct MatchedSample {
    std::vector<MatchedPair> pairs;
    // resume ids per slice, pair members kept together (male then female)
    std::vector<std::string> train_ids, eval_ids, test_ids;
};

MatchedSample split_matched(std::vector<MatchedPair> pairs, uint64_t master_seed) {
    MatchedSample sample;
    sample.pairs = std::move(pairs);
    SplitSpec spec;
    spec.seed = derive_seed(master_seed, "split");
    SplitResult result = split_indices(sample.pairs.size(), spec);
    auto expand = [&](const std::vector<size_t>& idxs, std::vector<std::string>& out) {
        for (size_t i : idxs) {
            out.push_back(sample.pairs[i].male_id);
            out.push_back(sample.pairs[i].female_id);
        }
    };
    expand(result.train, sample.train_ids);
    expand(result.eval, sample.eval_ids);
    expand(result.test, sample.test_ids);
    return sample;
}

struct CorpusIndex {
    std::map<std::string, size_t> resume_at;
    std::map<std::string, size_t> job_at;
    std::map<std::string, std::vector<size_t>> applications_of;  // resume id -> app idxs
};

CorpusIndex index_corpus(const Corpus& corpus) {
    CorpusIndex index;
    for (size_t i = 0; i < corpus.resumes.size(); ++i) index.resume_at[corpus.resumes[i].id] = i;
    for (size_t i = 0; i < corpus.jobs.size(); ++i) index.job_at[corpus.jobs[i].id] = i;
    for (size_t i = 0; i < corpus.applications.size(); ++i) {
        index.applications_of[corpus.applications[i].resume_id].push_back(i);
    }
    return index;
}

// base-plan redacted text per resume id
std::map<std::string, std::string> redact_ids(const Corpus& corpus, const CorpusIndex& index,
                                              std::span<const std::string> ids,
                                              const PlanContext& plan, int jobs) {
    std::vector<std::string> texts(ids.size());
    parallel_for(ids.size(), jobs, [&](size_t i) {
        auto it = index.resume_at.find(ids[i]);
        if (it == index.resume_at.end()) {
            throw DataError("pairs reference unknown resume id \"" + ids[i] + "\"");
        }
        const Resume& r = corpus.resumes[it->second];
        texts[i] = apply_plan_text(r.raw_text, r.applicant_name, plan.plan, plan.lexicons,
                                   plan.pii);
    });
    std::map<std::string, std::string> out;
    for (size_t i = 0; i < ids.size(); ++i) out[ids[i]] = std::move(texts[i]);
    return out;
}

struct GenderTrainingData {
    std::vector<TokenStream> docs;
    std::vector<int> labels;  // male = 1
};

GenderTrainingData gender_docs(const Corpus& corpus, const CorpusIndex& index,
                               std::span<const std::string> ids,
                               const std::map<std::string, std::string>& redacted) {
    GenderTrainingData data;
    data.docs.reserve(ids.size());
    data.labels.reserve(ids.size());
    for (const std::string& id : ids) {
        data.docs.push_back(tokenize(redacted.at(id)));
        const Resume& r = corpus.resumes[index.resume_at.at(id)];
        data.labels.push_back(r.gender == Gender::Male ? 1 : 0);
    }
    return data;
}

std::vector<Application> applications_for(const Corpus& corpus, const CorpusIndex& index,
                                          std::span<const std::string> ids) {
    std::vector<Application> apps;
    for (const std::string& id : ids) {
        auto it = index.applications_of.find(id);
        if (it == index.applications_of.end()) continue;
        for (size_t a : it->second) apps.push_back(corpus.applications[a]);
    }
    return apps;
}

// screening document built from an already redacted resume text
std::string screening_document(const Corpus& corpus, const CorpusIndex& index,
                               const Application& app, const std::string& resume_text) {
    const Resume& original = corpus.resumes[index.resume_at.at(app.resume_id)];
    Resume shadow = original;
    shadow.raw_text = resume_text;
    return assemble_document(shadow, corpus.jobs[index.job_at.at(app.job_id)]);
}

struct TrainedModels {
    ModelBundle gender;
    ModelBundle screening;
    double gender_alpha = 0.0;
    double screening_alpha = 0.0;
    double gender_eval_auroc = 0.0;
};

TrainedModels train_models(const Corpus& corpus, const CorpusIndex& index,
                           const MatchedSample& sample,
                           const std::map<std::string, std::string>& redacted,
                           const Params& params) {
    TrainedModels models;
    TrainConfig base = train_config_from_params(params);
    std::vector<double> alphas = parse_alpha_grid(params.get("alpha_grid"));
    size_t min_df = params.get_size("min_df");

    GenderTrainingData train = gender_docs(corpus, index, sample.train_ids, redacted);
    GenderTrainingData eval = gender_docs(corpus, index, sample.eval_ids, redacted);
    if (train.docs.empty() || eval.docs.empty()) {
        throw DataError("train: matched sample too small for an 80/10/10 split");
    }

    models.gender.feature_space = FeatureSpace::TfIdf;
    models.gender.vectorizer = TfIdfVectorizer::fit(train.docs, min_df);
    std::vector<SparseVector> X_train, X_eval;
    X_train.reserve(train.docs.size());
    for (const TokenStream& doc : train.docs) {
        X_train.push_back(models.gender.vectorizer.transform(doc));
    }
    X_eval.reserve(eval.docs.size());
    for (const TokenStream& doc : eval.docs) {
        X_eval.push_back(models.gender.vectorizer.transform(doc));
    }
    AlphaSelection selection =
        select_alpha(alphas, X_train, train.labels, X_eval, eval.labels,
                     models.gender.vectorizer.vocab_size(), base);
    models.gender.model = std::move(selection.model);
    models.gender.config = base;
    models.gender.config.alpha = selection.alpha;
    models.gender_alpha = selection.alpha;
    models.gender_eval_auroc = selection.eval_auroc;

    // screening model shares the split; train applications feed the fit and
    // eval applications pick alpha
    std::vector<Application> train_apps = applications_for(corpus, index, sample.train_ids);
    std::vector<Application> eval_apps = applications_for(corpus, index, sample.eval_ids);
    auto screening_data = [&](std::span<const Application> apps, std::vector<TokenStream>& docs,
                              std::vector<int>& labels) {
        docs.clear();
        labels.clear();
        for (const Application& app : apps) {
            docs.push_back(
                tokenize(screening_document(corpus, index, app, redacted.at(app.resume_id))));
            labels.push_back(app.callback ? 1 : 0);
        }
    };
    std::vector<TokenStream> screen_train_docs, screen_eval_docs;
    std::vector<int> screen_train_labels, screen_eval_labels;
    screening_data(train_apps, screen_train_docs, screen_train_labels);
    screening_data(eval_apps, screen_eval_docs, screen_eval_labels);
    bool has_pos = false, has_neg = false;
    for (int v : screen_train_labels) (v ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw DataError("train: both callback outcomes must be present in the train slice");
    }

    models.screening.feature_space = FeatureSpace::TfIdf;
    models.screening.vectorizer = TfIdfVectorizer::fit(screen_train_docs, min_df);
    std::vector<SparseVector> S_train, S_eval;
    for (const TokenStream& doc : screen_train_docs) {
        S_train.push_back(models.screening.vectorizer.transform(doc));
    }
    for (const TokenStream& doc : screen_eval_docs) {
        S_eval.push_back(models.screening.vectorizer.transform(doc));
    }
    AlphaSelection screen_selection =
        select_alpha(alphas, S_train, screen_train_labels, S_eval, screen_eval_labels,
                     models.screening.vectorizer.vocab_size(), base);
    models.screening.model = std::move(screen_selection.model);
    models.screening.config = base;
    models.screening.config.alpha = screen_selection.alpha;
    models.screening_alpha = screen_selection.alpha;
    return models;
}

FeatureRanking attribute_ranking(const Corpus& corpus, const CorpusIndex& index,
                                 const MatchedSample& sample,
                                 const std::map<std::string, std::string>& redacted,
                                 const ModelBundle& gender_model, const Params& params) {
    GenderTrainingData train = gender_docs(corpus, index, sample.train_ids, redacted);
    std::vector<SparseVector> X;
    X.reserve(train.docs.size());
    for (const TokenStream& doc : train.docs) {
        X.push_back(gender_model.vectorizer.transform(doc));
    }
    std::string mode = params.get("attr_mode");
    std::vector<Attribution> attributions(train.docs.size());
    if (mode == "linear") {
        LinearAttributor attributor(gender_model.model, gender_model.vectorizer,
                                    mean_transformed(gender_model.vectorizer, X));
        parallel_for(train.docs.size(), params.get_int("jobs"), [&](size_t i) {
            attributions[i] = attributor.attribute(sample.train_ids[i], train.docs[i]);
        });
    } else if (mode == "masking") {
        size_t samples = params.get_size("attr_samples");
        uint64_t seed = derive_seed(params.get_u64("seed"), "attribute");
        parallel_for(train.docs.size(), params.get_int("jobs"), [&](size_t i) {
            auto scorer = [&](const TokenStream& doc) {
                return predict_proba(gender_model.model, gender_model.vectorizer.transform(doc));
            };
            uint64_t doc_seed = mix64(seed ^ fnv1a64(sample.train_ids[i]));
            attributions[i] = attribute_masking(scorer, sample.train_ids[i], train.docs[i],
                                                samples, doc_seed)
                                  .attribution;
        });
    } else {
        throw UsageError("attr_mode must be linear or masking");
    }
    return rank_features(attributions);
}

struct LadderContext {
    const Corpus& corpus;
    const CorpusIndex& index;
    const MatchedSample& sample;
    const std::map<std::string, std::string>& redacted;  // base plan, test ids
    const ModelBundle& gender_model;
    const ModelBundle& screening_model;
    const FeatureRanking& ranking;
    const Params& params;
};

LadderPoint evaluate_ladder_point(const LadderContext& ctx, size_t k) {
    Lexicon topk;
    if (k > 0) topk = top_k_tokens(ctx.ranking, k);

    const std::vector<std::string>& ids = ctx.sample.test_ids;
    std::vector<double> gender_scores(ids.size());
    std::vector<int> gender_labels(ids.size());
    std::vector<std::string> texts(ids.size());
    parallel_for(ids.size(), ctx.params.get_int("jobs"), [&](size_t i) {
        const std::string& base_text = ctx.redacted.at(ids[i]);
        TokenStream tokens = tokenize(base_text);
        std::string text = base_text;
        if (k > 0) {
            tokens = redact_lexicon(tokens, topk);
            text = render(base_text, tokens);
        }
        texts[i] = std::move(text);
        gender_scores[i] =
            predict_proba(ctx.gender_model.model, ctx.gender_model.vectorizer.transform(tokens));
        const Resume& r = ctx.corpus.resumes[ctx.index.resume_at.at(ids[i])];
        gender_labels[i] = r.gender == Gender::Male ? 1 : 0;
    });

    LadderPoint point;
    point.gender_auroc = auroc(gender_scores, gender_labels);

    std::map<std::string, size_t> id_pos;
    for (size_t i = 0; i < ids.size(); ++i) id_pos[ids[i]] = i;
    std::vector<Application> test_apps = applications_for(ctx.corpus, ctx.index, ids);
    std::vector<ScoredExample> within;
    within.reserve(test_apps.size());
    for (const Application& app : test_apps) {
        size_t i = id_pos.at(app.resume_id);
        within.push_back({app.job_id, gender_scores[i], gender_labels[i]});
    }
    WithinJobResult within_result = within_job_auroc(within);
    point.gender_within_job_auroc = within_result.within_job_auroc;

    std::vector<double> screening_scores(test_apps.size());
    std::vector<int> screening_labels(test_apps.size());
    parallel_for(test_apps.size(), ctx.params.get_int("jobs"), [&](size_t a) {
        const Application& app = test_apps[a];
        std::string document =
            screening_document(ctx.corpus, ctx.index, app, texts[id_pos.at(app.resume_id)]);
        screening_scores[a] = predict_proba(
            ctx.screening_model.model,
            ctx.screening_model.vectorizer.transform(tokenize(document)));
        screening_labels[a] = app.callback ? 1 : 0;
    });
    bool has_pos = false, has_neg = false;
    for (int v : screening_labels) (v ? has_pos : has_neg) = true;
    if (!screening_labels.empty() && has_pos && has_neg) {
        point.screening_auroc = auroc(screening_scores, screening_labels);
    }
    return point;
}

// retraining variant (extension): models refit on the redacted train slice
LadderPoint evaluate_retrained_point(const LadderContext& ctx, size_t k) {
    std::map<std::string, std::string> redacted_k;
    Lexicon topk;
    if (k > 0) topk = top_k_tokens(ctx.ranking, k);
    auto redo = [&](const std::string& id) {
        const std::string& base_text = ctx.redacted.at(id);
        if (k == 0) return base_text;
        TokenStream tokens = redact_lexicon(tokenize(base_text), topk);
        return render(base_text, tokens);
    };
    for (const auto& ids :
         {ctx.sample.train_ids, ctx.sample.eval_ids, ctx.sample.test_ids}) {
        for (const std::string& id : ids) redacted_k[id] = redo(id);
    }
    TrainedModels models =
        train_models(ctx.corpus, ctx.index, ctx.sample, redacted_k, ctx.params);
    // redacted_k already carries the top-k pass, so evaluate at k = 0
    LadderContext retrained{ctx.corpus,    ctx.index,        ctx.sample,  redacted_k,
                            models.gender, models.screening, ctx.ranking, ctx.params};
    return evaluate_ladder_point(retrained, 0);
}

void stage_failed(const std::string& out_dir, const std::string& stage,
                  const std::string& what) {
    if (out_dir.empty()) return;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    try {
        write_file(path_join(out_dir, "FAILED"), "stage " + stage + ": " + what + "\n");
    } catch (...) {
        // the original error matters more than the marker
    }
}

template <typename F>
void run_stage(const std::string& out_dir, const std::string& stage, F&& body) {
    try {
        body();
    } catch (const UsageError& e) {
        stage_failed(out_dir, stage, e.what());
        throw UsageError("stage '" + stage + "' failed: " + e.what());
    } catch (const DataError& e) {
        stage_failed(out_dir, stage, e.what());
        throw DataError("stage '" + stage + "' failed: " + e.what());
    } catch (const std::exception& e) {
        stage_failed(out_dir, stage, e.what());
        throw std::runtime_error("stage '" + stage + "' failed: " + e.what());
    }
}

}  // namespace

LoadedCorpus load_corpus_file(const std::string& path) {
    LoadedCorpus loaded;
    std::string bytes = read_file(path);
    loaded.corpus = corpus_from_jsonl(bytes);
    loaded.source_path = path;
    loaded.source_hash = content_hash(bytes);
    return loaded;
}

std::string resolve_data_dir(const Params& params) {
    std::string dir = params.get("data_dir");
    if (!dir.empty()) return dir;
    if (const char* env = std::getenv("DEGENDER_DATA_DIR"); env && *env) return env;
    return DEGENDER_DEFAULT_DATA_DIR;
}

SynthConfig synth_config_from_params(const Params& params) {
    SynthConfig cfg;
    cfg.n_resumes = params.get_size("n_resumes");
    cfg.seed = params.get_u64("seed");
    cfg.gendered_token_odds = parse_odds(params.get("odds"));
    cfg.hobby_gender_skew = params.get_double("hobby_gender_skew");
    cfg.gender_word_rate = params.get_double("gender_word_rate");
    cfg.callback_bias = params.get_double("callback_bias");
    cfg.callback_base_rate = params.get_double("callback_base_rate");
    cfg.callback_skill_gain = params.get_double("callback_skill_gain");
    cfg.marker_base_rate = params.get_double("marker_base_rate");
    cfg.contact_rate = params.get_double("contact_rate");
    cfg.gendered_names = params.get_bool("gendered_names");
    cfg.skill_vocab_size = params.get_size("skill_vocab_size");
    cfg.n_jobs = params.get_size("n_jobs");
    std::vector<std::string> names = name_list_paths(params);
    cfg.male_names = read_wordlist(names[0]);
    cfg.female_names = read_wordlist(names[1]);
    return cfg;
}

PlanContext resolve_plan(const Params& params, const std::string& plan_spec) {
    std::string data_dir = resolve_data_dir(params);
    RedactionPlan plan = RedactionPlan::parse(plan_spec);
    std::map<std::string, Lexicon> lexicons;
    std::map<std::string, std::string> hashes;
    for (const RedactionPass& pass : plan.passes) {
        if (pass.kind == RedactionPass::Kind::Pii) continue;
        std::string path;
        if (pass.kind == RedactionPass::Kind::TokenList) {
            path = pass.name;
            lexicons.emplace(pass.key(), Lexicon::load_token_list(pass.name, path));
        } else {
            std::string binding = params.get("lexicon." + pass.name);
            path = binding.empty() ? bundled_path(data_dir, pass.name + ".txt") : binding;
            lexicons.emplace(pass.key(), Lexicon::load(pass.name, path));
        }
        hashes[path] = file_content_hash(path);
    }
    std::vector<std::string> names = name_list_paths(params);
    for (const std::string& path : names) hashes[path] = file_content_hash(path);
    return PlanContext{std::move(plan), std::move(lexicons), PiiRedactor::load(names),
                       std::move(hashes)};
}

void run_synth(const Params& params, const std::string& out_path) {
    SynthConfig cfg = synth_config_from_params(params);
    Corpus corpus = generate_synthetic(cfg);
    save_corpus(corpus, out_path);
    std::map<std::string, std::string> inputs;
    for (const std::string& path : name_list_paths(params)) {
        inputs[path] = file_content_hash(path);
    }
    write_manifest(out_path + ".manifest.json", "synth", params, inputs);
}

void run_redact(const LoadedCorpus& input, const Params& params, const std::string& out_path) {
    PlanContext plan = resolve_plan(params, params.get("plan"));
    Corpus redacted = input.corpus;
    int jobs = params.get_int("jobs");
    parallel_for(redacted.resumes.size(), jobs, [&](size_t i) {
        redacted.resumes[i] =
            apply_plan(redacted.resumes[i], plan.plan, plan.lexicons, plan.pii);
    });
    save_corpus(redacted, out_path);
    std::map<std::string, std::string> inputs = plan.input_hashes;
    inputs[input.source_path] = input.source_hash;
    write_manifest(out_path + ".manifest.json", "redact", params, inputs);
}

namespace {

struct MatchInputs {
    EmbeddingModel embedding;
    std::map<std::string, ResumeVector> vectors;
    std::vector<MatchedPair> pairs;
    std::string skills_file;
    std::string vectors_file;  // non-empty when pre-trained vectors were loaded
};

MatchInputs compute_match(const Corpus& corpus, const Params& params) {
    MatchInputs out;
    out.skills_file = skills_path(params);
    Lexicon skills = Lexicon::load("skills", out.skills_file);

    std::vector<TokenStream> token_streams(corpus.resumes.size());
    parallel_for(corpus.resumes.size(), params.get_int("jobs"), [&](size_t i) {
        token_streams[i] = tokenize(corpus.resumes[i].raw_text);
    });
    out.vectors_file = params.get("vectors");
    if (out.vectors_file.empty()) {
        out.embedding = train_skipgram(token_streams, embedding_config_from_params(params));
    } else {
        out.embedding = load_vectors(out.vectors_file);
    }

    std::vector<Resume> males, females;
    for (size_t i = 0; i < corpus.resumes.size(); ++i) {
        const Resume& r = corpus.resumes[i];
        ResumeVector v = resume_vector(r.id, token_streams[i], out.embedding, skills);
        out.vectors.emplace(r.id, std::move(v));
        (r.gender == Gender::Male ? males : females).push_back(r);
    }
    out.pairs = match_resumes(males, females, out.vectors, match_config_from_params(params));
    return out;
}

}  // namespace

void run_match(const LoadedCorpus& input, const Params& params,
               const std::string& out_pairs_csv) {
    MatchInputs match = compute_match(input.corpus, params);
    save_pairs(match.pairs, out_pairs_csv);
    std::map<std::string, std::string> inputs;
    inputs[input.source_path] = input.source_hash;
    inputs[match.skills_file] = file_content_hash(match.skills_file);
    if (!match.vectors_file.empty()) {
        inputs[match.vectors_file] = file_content_hash(match.vectors_file);
    }
    write_manifest(out_pairs_csv + ".manifest.json", "match", params, inputs);
}

void run_train(const LoadedCorpus& input, const Params& params, const std::string& pairs_csv,
               const std::string& out_dir) {
    fs::create_directories(out_dir);
    PlanContext plan = resolve_plan(params, params.get("plan"));
    CorpusIndex index = index_corpus(input.corpus);
    MatchedSample sample = split_matched(load_pairs(pairs_csv), params.get_u64("seed"));

    std::vector<std::string> all_ids;
    for (const auto& ids : {sample.train_ids, sample.eval_ids, sample.test_ids}) {
        all_ids.insert(all_ids.end(), ids.begin(), ids.end());
    }
    std::map<std::string, std::string> redacted =
        redact_ids(input.corpus, index, all_ids, plan, params.get_int("jobs"));

    TrainedModels models = train_models(input.corpus, index, sample, redacted, params);
    save_model(models.gender, path_join(out_dir, "gender_model.json"));
    save_model(models.screening, path_join(out_dir, "screening_model.json"));

    std::ostringstream splits;
    splits << "resume_id,slice\n";
    for (const std::string& id : sample.train_ids) splits << id << ",train\n";
    for (const std::string& id : sample.eval_ids) splits << id << ",eval\n";
    for (const std::string& id : sample.test_ids) splits << id << ",test\n";
    write_file(path_join(out_dir, "splits.csv"), splits.str());

    std::map<std::string, std::string> inputs = plan.input_hashes;
    inputs[input.source_path] = input.source_hash;
    inputs[pairs_csv] = file_content_hash(pairs_csv);
    write_manifest(path_join(out_dir, "manifest.json"), "train", params, inputs);
}

void run_attribute(const LoadedCorpus& input, const Params& params,
                   const std::string& pairs_csv, const std::string& gender_model_path,
                   const std::string& out_ranking_csv) {
    PlanContext plan = resolve_plan(params, params.get("plan"));
    CorpusIndex index = index_corpus(input.corpus);
    MatchedSample sample = split_matched(load_pairs(pairs_csv), params.get_u64("seed"));
    std::map<std::string, std::string> redacted =
        redact_ids(input.corpus, index, sample.train_ids, plan, params.get_int("jobs"));
    ModelBundle gender_model = load_model(gender_model_path);
    if (gender_model.feature_space != FeatureSpace::TfIdf) {
        throw DataError("attribute: gender model must be in tf-idf feature space");
    }
    FeatureRanking ranking =
        attribute_ranking(input.corpus, index, sample, redacted, gender_model, params);
    save_ranking(ranking, out_ranking_csv);
    std::map<std::string, std::string> inputs = plan.input_hashes;
    inputs[input.source_path] = input.source_hash;
    inputs[pairs_csv] = file_content_hash(pairs_csv);
    inputs[gender_model_path] = file_content_hash(gender_model_path);
    write_manifest(out_ranking_csv + ".manifest.json", "attribute", params, inputs);
}

void run_eval(const LoadedCorpus& input, const Params& params, const std::string& pairs_csv,
              const std::string& gender_model_path, const std::string& screening_model_path,
              const std::string& ranking_csv, const std::string& out_tradeoff_csv) {
    PlanContext plan = resolve_plan(params, params.get("plan"));
    CorpusIndex index = index_corpus(input.corpus);
    MatchedSample sample = split_matched(load_pairs(pairs_csv), params.get_u64("seed"));
    bool retrain = params.get_bool("retrain");

    std::vector<std::string> ids = sample.test_ids;
    if (retrain) {
        ids.insert(ids.end(), sample.train_ids.begin(), sample.train_ids.end());
        ids.insert(ids.end(), sample.eval_ids.begin(), sample.eval_ids.end());
    }
    std::map<std::string, std::string> redacted =
        redact_ids(input.corpus, index, ids, plan, params.get_int("jobs"));

    ModelBundle gender_model = load_model(gender_model_path);
    ModelBundle screening_model = load_model(screening_model_path);
    FeatureRanking ranking = load_ranking(ranking_csv);
    std::vector<size_t> grid = resolve_grid(params.get("grid"), ranking.entries.size());

    LadderContext ctx{input.corpus, index,           sample,  redacted,
                      gender_model, screening_model, ranking, params};
    std::vector<LadderRow> rows = run_ladder(
        grid, ranking.entries.size(),
        [&](size_t k) {
            return retrain ? evaluate_retrained_point(ctx, k) : evaluate_ladder_point(ctx, k);
        },
        retrain ? "retrain" : "base");
    emit_tradeoff(rows, out_tradeoff_csv);
    if (params.get("format") == "jsonl") {
        emit_tradeoff_jsonl(rows, out_tradeoff_csv + ".jsonl");
    }
    std::fputs(tradeoff_summary(rows).c_str(), stdout);

    std::map<std::string, std::string> inputs = plan.input_hashes;
    inputs[input.source_path] = input.source_hash;
    inputs[pairs_csv] = file_content_hash(pairs_csv);
    inputs[gender_model_path] = file_content_hash(gender_model_path);
    inputs[screening_model_path] = file_content_hash(screening_model_path);
    inputs[ranking_csv] = file_content_hash(ranking_csv);
    write_manifest(out_tradeoff_csv + ".manifest.json", "eval", params, inputs);
}

void run_pipeline(const LoadedCorpus& input, const Params& params, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::error_code ec;
    fs::remove(path_join(out_dir, "FAILED"), ec);

    const Corpus& corpus = input.corpus;
    CorpusIndex index = index_corpus(corpus);
    int jobs = params.get_int("jobs");

    PlanContext plan{RedactionPlan{}, {}, PiiRedactor(std::set<std::string>{}), {}};
    run_stage(out_dir, "plan", [&] { plan = resolve_plan(params, params.get("plan")); });

    MatchInputs match;
    run_stage(out_dir, "match", [&] {
        match = compute_match(corpus, params);
        if (match.pairs.empty()) throw DataError("matching produced no pairs");
        save_vectors(match.embedding, path_join(out_dir, "embeddings.vec"));
        save_pairs(match.pairs, path_join(out_dir, "pairs.csv"));
    });

    MatchedSample sample;
    run_stage(out_dir, "split", [&] {
        sample = split_matched(match.pairs, params.get_u64("seed"));
        if (sample.train_ids.empty() || sample.eval_ids.empty() || sample.test_ids.empty()) {
            throw DataError("matched sample too small for an 80/10/10 split");
        }
        std::ostringstream splits;
        splits << "resume_id,slice\n";
        for (const std::string& id : sample.train_ids) splits << id << ",train\n";
        for (const std::string& id : sample.eval_ids) splits << id << ",eval\n";
        for (const std::string& id : sample.test_ids) splits << id << ",test\n";
        write_file(path_join(out_dir, "splits.csv"), splits.str());
    });

    std::map<std::string, std::string> redacted;
    run_stage(out_dir, "redact", [&] {
        std::vector<std::string> all_ids;
        for (const auto& ids : {sample.train_ids, sample.eval_ids, sample.test_ids}) {
            all_ids.insert(all_ids.end(), ids.begin(), ids.end());
        }
        redacted = redact_ids(corpus, index, all_ids, plan, jobs);
        Corpus redacted_corpus;
        redacted_corpus.jobs = corpus.jobs;
        std::set<std::string> matched_ids(all_ids.begin(), all_ids.end());
        for (const Resume& r : corpus.resumes) {
            if (!matched_ids.count(r.id)) continue;
            Resume copy = r;
            copy.raw_text = redacted.at(r.id);
            redacted_corpus.resumes.push_back(std::move(copy));
        }
        for (const Application& app : corpus.applications) {
            if (matched_ids.count(app.resume_id)) redacted_corpus.applications.push_back(app);
        }
        save_corpus(redacted_corpus, path_join(out_dir, "redacted.jsonl"));
    });

    TrainedModels models;
    run_stage(out_dir, "train", [&] {
        models = train_models(corpus, index, sample, redacted, params);
        save_model(models.gender, path_join(out_dir, "gender_model.json"));
        save_model(models.screening, path_join(out_dir, "screening_model.json"));
        std::printf("stage train: gender alpha %g (eval auroc %.4f), screening alpha %g\n",
                    models.gender_alpha, models.gender_eval_auroc, models.screening_alpha);
    });

    run_stage(out_dir, "score", [&] {
        std::vector<Application> test_apps = applications_for(corpus, index, sample.test_ids);
        std::vector<ApplicationScore> scores(test_apps.size());
        parallel_for(test_apps.size(), jobs, [&](size_t a) {
            std::string document = screening_document(corpus, index, test_apps[a],
                                                      redacted.at(test_apps[a].resume_id));
            scores[a] = {test_apps[a],
                         predict_proba(models.screening.model,
                                       models.screening.vectorizer.transform(
                                           tokenize(document)))};
        });
        save_scores(scores, path_join(out_dir, "screening_scores.csv"));
    });

    FeatureRanking ranking;
    run_stage(out_dir, "attribute", [&] {
        ranking = attribute_ranking(corpus, index, sample, redacted, models.gender, params);
        save_ranking(ranking, path_join(out_dir, "ranking.csv"));
    });

    run_stage(out_dir, "ladder", [&] {
        std::vector<size_t> grid = resolve_grid(params.get("grid"), ranking.entries.size());
        bool retrain = params.get_bool("retrain");
        LadderContext ctx{corpus,        index,           sample,  redacted,
                          models.gender, models.screening, ranking, params};
        std::vector<LadderRow> rows = run_ladder(
            grid, ranking.entries.size(),
            [&](size_t k) {
                return retrain ? evaluate_retrained_point(ctx, k)
                               : evaluate_ladder_point(ctx, k);
            },
            retrain ? "retrain" : "base");
        emit_tradeoff(rows, path_join(out_dir, "tradeoff.csv"));
        if (params.get("format") == "jsonl") {
            emit_tradeoff_jsonl(rows, path_join(out_dir, "tradeoff.jsonl"));
        }
        std::fputs(tradeoff_summary(rows).c_str(), stdout);
    });

    if (params.get_bool("debias_compare")) {
        run_stage(out_dir, "debias", [&] {
            std::string pairs_file = definitional_pairs_path(params);
            auto def_pairs = load_definitional_pairs(pairs_file);
            std::vector<std::pair<std::string, std::string>> usable;
            for (const auto& pair : def_pairs) {
                if (match.embedding.index_of(pair.first) &&
                    match.embedding.index_of(pair.second)) {
                    usable.push_back(pair);
                }
            }
            if (usable.empty()) {
                std::fprintf(stderr,
                             "warning: no definitional pair is in the embedding vocabulary; "
                             "skipping the debias comparison\n");
                write_file(path_join(out_dir, "embedding_compare.csv"), "model,auroc\n");
                return;
            }
            GenderDirection direction = gender_direction(match.embedding, usable);
            std::set<std::string> protected_tokens;
            for (const auto& pair : usable) {
                protected_tokens.insert(pair.first);
                protected_tokens.insert(pair.second);
            }
            DebiasResult debiased =
                hard_debias(match.embedding, direction, protected_tokens);
            save_vectors(debiased.model, path_join(out_dir, "embeddings_debiased.vec"));

            auto embed_xy = [&](const EmbeddingModel& model,
                                std::span<const std::string> ids, std::vector<SparseVector>& X,
                                std::vector<int>& y) {
                X.clear();
                y.clear();
                for (const std::string& id : ids) {
                    std::vector<double> mean = mean_token_vector(tokenize(redacted.at(id)), model);
                    SparseVector x;
                    x.reserve(mean.size());
                    for (size_t j = 0; j < mean.size(); ++j) {
                        x.push_back({static_cast<uint32_t>(j), mean[j]});
                    }
                    X.push_back(std::move(x));
                    const Resume& r = corpus.resumes[index.resume_at.at(id)];
                    y.push_back(r.gender == Gender::Male ? 1 : 0);
                }
            };
            TrainConfig base = train_config_from_params(params);
            std::vector<double> alphas = parse_alpha_grid(params.get("alpha_grid"));
            auto evaluate_model = [&](const EmbeddingModel& model) {
                std::vector<SparseVector> X_train, X_eval, X_test;
                std::vector<int> y_train, y_eval, y_test;
                embed_xy(model, sample.train_ids, X_train, y_train);
                embed_xy(model, sample.eval_ids, X_eval, y_eval);
                embed_xy(model, sample.test_ids, X_test, y_test);
                AlphaSelection sel = select_alpha(alphas, X_train, y_train, X_eval, y_eval,
                                                  model.dim(), base);
                std::vector<double> scores;
                scores.reserve(X_test.size());
                for (const SparseVector& x : X_test) {
                    scores.push_back(predict_proba(sel.model, x));
                }
                return auroc(scores, y_test);
            };
            double raw_auroc = evaluate_model(match.embedding);
            double debiased_auroc = evaluate_model(debiased.model);
            std::ostringstream compare;
            compare << "model,auroc\n";
            compare << "word2vec_raw," << format_double(raw_auroc) << '\n';
            compare << "word2vec_debiased," << format_double(debiased_auroc) << '\n';
            write_file(path_join(out_dir, "embedding_compare.csv"), compare.str());
            std::printf("stage debias: raw auroc %.4f, debiased auroc %.4f (delta %+.4f)\n",
                        raw_auroc, debiased_auroc, debiased_auroc - raw_auroc);
        });
    }

    run_stage(out_dir, "manifest", [&] {
        std::map<std::string, std::string> inputs = plan.input_hashes;
        inputs[input.source_path] = input.source_hash;
        inputs[match.skills_file] = file_content_hash(match.skills_file);
        write_manifest(path_join(out_dir, "manifest.json"), "pipeline", params, inputs);
    });
}

double run_oracle(const Params& params, size_t n_mc) {
    return oracle_gender_auroc(synth_config_from_params(params), n_mc);
}

}  // namespace degender
