#include "degender.h"

#include <memory>
#include <string>
#include <vector>

#include "degender/corpus.hpp"
#include "degender/errors.hpp"
#include "degender/evaluation.hpp"
#include "degender/manifest.hpp"
#include "degender/params.hpp"
#include "degender/pipeline.hpp"

struct dg_params {
    degender::Params params;
    std::string scratch;  // backs dg_params_get
};

struct dg_corpus {
    degender::LoadedCorpus loaded;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
dg_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return DG_OK;
    } catch (const degender::UsageError& e) {
        g_last_error = e.what();
        return DG_ERR_USAGE;
    } catch (const degender::DataError& e) {
        g_last_error = e.what();
        return DG_ERR_DATA;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DG_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return DG_ERR_INTERNAL;
    }
}

void require(bool condition, const char* what) {
    if (!condition) throw degender::UsageError(what);
}

}  // namespace

extern "C" {

const char* dg_version(void) { return degender::kToolVersion; }

const char* dg_last_error(void) { return g_last_error.c_str(); }

dg_status dg_params_create(dg_params** out) {
    return guarded([&] {
        require(out != nullptr, "dg_params_create: out is NULL");
        *out = new dg_params();
    });
}

void dg_params_free(dg_params* params) { delete params; }

dg_status dg_params_set(dg_params* params, const char* key, const char* value) {
    return guarded([&] {
        require(params && key && value, "dg_params_set: NULL argument");
        params->params.set(key, value);
    });
}

const char* dg_params_get(dg_params* params, const char* key) {
    if (!params || !key) return nullptr;
    try {
        params->scratch = params->params.get(key);
        return params->scratch.c_str();
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

dg_status dg_params_load_file(dg_params* params, const char* path) {
    return guarded([&] {
        require(params && path, "dg_params_load_file: NULL argument");
        degender::Params from_file = degender::Params::from_file(path);
        from_file.merge(params->params);  // explicit set() calls win
        params->params = std::move(from_file);
    });
}

dg_status dg_corpus_load(const char* path, dg_corpus** out) {
    return guarded([&] {
        require(path && out, "dg_corpus_load: NULL argument");
        auto handle = std::make_unique<dg_corpus>();
        handle->loaded = degender::load_corpus_file(path);
        *out = handle.release();
    });
}

dg_status dg_corpus_save(const dg_corpus* corpus, const char* path) {
    return guarded([&] {
        require(corpus && path, "dg_corpus_save: NULL argument");
        degender::save_corpus(corpus->loaded.corpus, path);
    });
}

void dg_corpus_free(dg_corpus* corpus) { delete corpus; }

size_t dg_corpus_resumes(const dg_corpus* corpus) {
    return corpus ? corpus->loaded.corpus.resumes.size() : 0;
}

size_t dg_corpus_jobs(const dg_corpus* corpus) {
    return corpus ? corpus->loaded.corpus.jobs.size() : 0;
}

size_t dg_corpus_applications(const dg_corpus* corpus) {
    return corpus ? corpus->loaded.corpus.applications.size() : 0;
}

dg_status dg_corpus_generate(const dg_params* params, dg_corpus** out) {
    return guarded([&] {
        require(params && out, "dg_corpus_generate: NULL argument");
        auto handle = std::make_unique<dg_corpus>();
        handle->loaded.corpus =
            degender::generate_synthetic(degender::synth_config_from_params(params->params));
        handle->loaded.source_path = "<generated>";
        handle->loaded.source_hash =
            degender::content_hash(degender::corpus_to_jsonl(handle->loaded.corpus));
        *out = handle.release();
    });
}

dg_status dg_corpus_redact(const dg_corpus* corpus, const dg_params* params, dg_corpus** out) {
    return guarded([&] {
        require(corpus && params && out, "dg_corpus_redact: NULL argument");
        degender::PlanContext plan =
            degender::resolve_plan(params->params, params->params.get("plan"));
        auto handle = std::make_unique<dg_corpus>();
        handle->loaded.corpus = corpus->loaded.corpus;
        for (degender::Resume& r : handle->loaded.corpus.resumes) {
            r = degender::apply_plan(r, plan.plan, plan.lexicons, plan.pii);
        }
        handle->loaded.source_path = corpus->loaded.source_path;
        handle->loaded.source_hash =
            degender::content_hash(degender::corpus_to_jsonl(handle->loaded.corpus));
        *out = handle.release();
    });
}

dg_status dg_oracle_gender_auroc(const dg_params* params, uint64_t n_mc, double* out) {
    return guarded([&] {
        require(params && out, "dg_oracle_gender_auroc: NULL argument");
        *out = degender::run_oracle(params->params, static_cast<size_t>(n_mc));
    });
}

dg_status dg_run_synth(const dg_params* params, const char* out_corpus_path) {
    return guarded([&] {
        require(params && out_corpus_path, "dg_run_synth: NULL argument");
        degender::run_synth(params->params, out_corpus_path);
    });
}

dg_status dg_run_redact(const dg_corpus* corpus, const dg_params* params,
                        const char* out_corpus_path) {
    return guarded([&] {
        require(corpus && params && out_corpus_path, "dg_run_redact: NULL argument");
        degender::run_redact(corpus->loaded, params->params, out_corpus_path);
    });
}

dg_status dg_run_match(const dg_corpus* corpus, const dg_params* params,
                       const char* out_pairs_csv) {
    return guarded([&] {
        require(corpus && params && out_pairs_csv, "dg_run_match: NULL argument");
        degender::run_match(corpus->loaded, params->params, out_pairs_csv);
    });
}

dg_status dg_run_train(const dg_corpus* corpus, const dg_params* params, const char* pairs_csv,
                       const char* out_dir) {
    return guarded([&] {
        require(corpus && params && pairs_csv && out_dir, "dg_run_train: NULL argument");
        degender::run_train(corpus->loaded, params->params, pairs_csv, out_dir);
    });
}

dg_status dg_run_attribute(const dg_corpus* corpus, const dg_params* params,
                           const char* pairs_csv, const char* gender_model_json,
                           const char* out_ranking_csv) {
    return guarded([&] {
        require(corpus && params && pairs_csv && gender_model_json && out_ranking_csv,
                "dg_run_attribute: NULL argument");
        degender::run_attribute(corpus->loaded, params->params, pairs_csv, gender_model_json,
                                out_ranking_csv);
    });
}

dg_status dg_run_eval(const dg_corpus* corpus, const dg_params* params, const char* pairs_csv,
                      const char* gender_model_json, const char* screening_model_json,
                      const char* ranking_csv, const char* out_tradeoff_csv) {
    return guarded([&] {
        require(corpus && params && pairs_csv && gender_model_json && screening_model_json &&
                    ranking_csv && out_tradeoff_csv,
                "dg_run_eval: NULL argument");
        degender::run_eval(corpus->loaded, params->params, pairs_csv, gender_model_json,
                           screening_model_json, ranking_csv, out_tradeoff_csv);
    });
}

dg_status dg_run_pipeline(const dg_corpus* corpus, const dg_params* params,
                          const char* out_dir) {
    return guarded([&] {
        require(corpus && params && out_dir, "dg_run_pipeline: NULL argument");
        degender::run_pipeline(corpus->loaded, params->params, out_dir);
    });
}

dg_status dg_auroc(const double* scores, const int32_t* labels, size_t n, double* out) {
    return guarded([&] {
        require(scores && labels && out, "dg_auroc: NULL argument");
        std::vector<double> s(scores, scores + n);
        std::vector<int> l(labels, labels + n);
        *out = degender::auroc(s, l);
    });
}

}  // extern "C"
