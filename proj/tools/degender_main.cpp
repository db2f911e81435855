// degender CLI: synth | redact | match | train | attribute | eval | pipeline.
// Thin flag layer over the shared library's C API; every stage writes its
// artifacts plus a manifest. Exit codes: 0 ok, 1 usage, 2 data, 3 internal.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "degender.h"

namespace {

struct ParamsHandle {
    dg_params* ptr = nullptr;
    ParamsHandle() { dg_params_create(&ptr); }
    ~ParamsHandle() { dg_params_free(ptr); }
    ParamsHandle(const ParamsHandle&) = delete;
    ParamsHandle& operator=(const ParamsHandle&) = delete;
};

struct CorpusHandle {
    dg_corpus* ptr = nullptr;
    ~CorpusHandle() { dg_corpus_free(ptr); }
};

int fail(dg_status status) {
    std::fprintf(stderr, "error: %s\n", dg_last_error());
    return static_cast<int>(status);
}

// Flags land in a key/value list applied to dg_params after any config file,
// so the CLI wins over file values.
struct PendingParams {
    std::vector<std::pair<std::string, std::string>> values;
    std::string config_file;

    void stage(CLI::App* cmd, const std::string& flag, const std::string& key,
               const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { values.emplace_back(key, v); }, help);
    }

    void stage_flag(CLI::App* cmd, const std::string& flag, const std::string& key,
                    const std::string& help) {
        cmd->add_flag_callback(
            flag, [this, key] { values.emplace_back(key, "true"); }, help);
    }

    int apply(dg_params* params) const {
        if (!config_file.empty()) {
            if (dg_status s = dg_params_load_file(params, config_file.c_str()); s != DG_OK) {
                return fail(s);
            }
        }
        for (const auto& [key, value] : values) {
            if (dg_status s = dg_params_set(params, key.c_str(), value.c_str()); s != DG_OK) {
                return fail(s);
            }
        }
        return 0;
    }
};

void add_common_options(CLI::App* cmd, PendingParams& pending) {
    pending.stage(cmd, "--seed", "seed", "master seed (default 42)");
    pending.stage(cmd, "--jobs", "jobs", "worker threads for per-document stages");
    pending.stage(cmd, "--data-dir", "data_dir",
                  "lexicon directory (default: $DEGENDER_DATA_DIR or bundled)");
}

void add_plan_options(CLI::App* cmd, PendingParams& pending) {
    pending.stage(cmd, "--plan", "plan",
                  "redaction passes, e.g. pii,gender_words,hobbies or token_list:PATH");
    cmd->add_option_function<std::vector<std::string>>(
        "--lexicon",
        [&pending](const std::vector<std::string>& bindings) {
            for (const std::string& binding : bindings) {
                size_t eq = binding.find('=');
                if (eq == std::string::npos) {
                    throw CLI::ValidationError("--lexicon expects name=path");
                }
                pending.values.emplace_back("lexicon." + binding.substr(0, eq),
                                            binding.substr(eq + 1));
            }
        },
        "bind a lexicon name to a file (name=path, repeatable)");
}

void add_synth_options(CLI::App* cmd, PendingParams& pending) {
    pending.stage(cmd, "--n", "n_resumes", "number of resumes to generate");
    pending.stage(cmd, "--n-jobs", "n_jobs", "job postings (0: one per ~200 resumes)");
    cmd->add_option_function<std::vector<std::string>>(
        "--odds",
        [&pending](const std::vector<std::string>& odds) {
            std::string joined;
            for (const std::string& o : odds) {
                if (!joined.empty()) joined += ',';
                joined += o;
            }
            pending.values.emplace_back("odds", joined);
        },
        "planted marker odds token=ratio (repeatable; default: demo set, 'none' disables)");
    pending.stage(cmd, "--bias", "callback_bias", "additive male callback log-odds effect");
    pending.stage(cmd, "--hobby-skew", "hobby_gender_skew",
                  "probability a hobby draw is gender-stereotyped");
    pending.stage(cmd, "--gender-word-rate", "gender_word_rate",
                  "probability of one gender-indicating word per resume");
    pending.stage(cmd, "--callback-base-rate", "callback_base_rate",
                  "baseline callback probability");
    pending.stage(cmd, "--gendered-names", "gendered_names",
                  "true/false: draw first names from gender-matched lists");
    pending.stage(cmd, "--skill-vocab", "skill_vocab_size",
                  "distinct skill tokens available to the generator");
    pending.stage(cmd, "--male-names", "male_names", "male first-name list path");
    pending.stage(cmd, "--female-names", "female_names", "female first-name list path");
}

void add_embedding_options(CLI::App* cmd, PendingParams& pending) {
    pending.stage(cmd, "--dim", "dim", "embedding dimension");
    pending.stage(cmd, "--window", "window", "skip-gram window");
    pending.stage(cmd, "--negatives", "negatives", "negative samples per context");
    pending.stage(cmd, "--epochs", "epochs", "skip-gram epochs");
    pending.stage(cmd, "--min-count", "min_count", "minimum embedding vocabulary count");
    pending.stage(cmd, "--subsample", "subsample",
                  "frequent-token subsampling threshold (0 disables)");
    pending.stage(cmd, "--vectors", "vectors",
                  "pre-trained vector file to load instead of training");
    pending.stage(cmd, "--skills", "skills", "skills lexicon path (default: bundled)");
}

void add_match_options(CLI::App* cmd, PendingParams& pending) {
    pending.stage(cmd, "--max-exp-gap", "max_experience_gap", "maximum experience gap in years");
    pending.stage(cmd, "--min-cosine", "min_cosine", "minimum resume-vector cosine");
    pending.stage(cmd, "--same-degree", "same_degree", "true/false: require equal degree");
    pending.stage(cmd, "--same-field", "same_field", "true/false: require equal field");
}

void add_train_options(CLI::App* cmd, PendingParams& pending) {
    pending.stage(cmd, "--alpha-grid", "alpha_grid", "elastic-net strengths, comma separated");
    pending.stage(cmd, "--lambda", "lambda", "elastic-net mixing parameter");
    pending.stage(cmd, "--max-iters", "max_iters", "optimizer iteration cap");
    pending.stage(cmd, "--tolerance", "tolerance", "relative objective-decrease threshold");
    pending.stage(cmd, "--min-df", "min_df", "minimum document frequency for tf-idf");
}

int load_corpus_arg(const std::string& path, CorpusHandle& corpus) {
    if (dg_status s = dg_corpus_load(path.c_str(), &corpus.ptr); s != DG_OK) return fail(s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gender obfuscation toolkit for resume corpora"};
    app.require_subcommand(1);

    struct Command {
        PendingParams pending;
        std::string corpus_path, out, out_dir, pairs, gender_model, screening_model, ranking;
    };

    Command synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    synth_cmd->add_option("--out", synth.out, "output corpus file (.jsonl)")->required();
    synth_cmd->add_option("--config", synth.pending.config_file,
                          "key = value config file (flags override it)");
    add_common_options(synth_cmd, synth.pending);
    add_synth_options(synth_cmd, synth.pending);

    Command oracle;
    std::string oracle_n_mc = "100000";
    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle", "Bayes-optimal gender AUROC of a synthetic configuration");
    oracle_cmd->add_option("--n-mc", oracle_n_mc, "Monte-Carlo draws per gender (>= 10000)");
    oracle_cmd->add_option("--config", oracle.pending.config_file, "key = value config file");
    add_common_options(oracle_cmd, oracle.pending);
    add_synth_options(oracle_cmd, oracle.pending);

    Command redact;
    CLI::App* redact_cmd = app.add_subcommand("redact", "apply a redaction plan to a corpus");
    redact_cmd->add_option("--corpus", redact.corpus_path, "input corpus file")->required();
    redact_cmd->add_option("--out", redact.out, "output corpus file")->required();
    add_common_options(redact_cmd, redact.pending);
    add_plan_options(redact_cmd, redact.pending);

    Command match;
    CLI::App* match_cmd =
        app.add_subcommand("match", "build the gender-balanced matched sample");
    match_cmd->add_option("--corpus", match.corpus_path, "input corpus file")->required();
    match_cmd->add_option("--out", match.out, "output pairs CSV")->required();
    add_common_options(match_cmd, match.pending);
    add_embedding_options(match_cmd, match.pending);
    add_match_options(match_cmd, match.pending);

    Command train;
    CLI::App* train_cmd =
        app.add_subcommand("train", "train the gender and screening classifiers");
    train_cmd->add_option("--corpus", train.corpus_path, "input corpus file")->required();
    train_cmd->add_option("--pairs", train.pairs, "matched pairs CSV")->required();
    train_cmd->add_option("--out-dir", train.out_dir, "model output directory")->required();
    add_common_options(train_cmd, train.pending);
    add_plan_options(train_cmd, train.pending);
    add_train_options(train_cmd, train.pending);

    Command attribute;
    CLI::App* attribute_cmd =
        app.add_subcommand("attribute", "rank gender-predictive features");
    attribute_cmd->add_option("--corpus", attribute.corpus_path, "input corpus file")
        ->required();
    attribute_cmd->add_option("--pairs", attribute.pairs, "matched pairs CSV")->required();
    attribute_cmd->add_option("--gender-model", attribute.gender_model, "gender model JSON")
        ->required();
    attribute_cmd->add_option("--out", attribute.out, "output ranking CSV")->required();
    attribute_cmd
        ->add_option_function<std::string>(
            "--mode",
            [&attribute](const std::string& v) {
                attribute.pending.values.emplace_back("attr_mode", v);
            },
            "attribution mode: linear or masking");
    attribute_cmd->add_option_function<std::string>(
        "--samples",
        [&attribute](const std::string& v) {
            attribute.pending.values.emplace_back("attr_samples", v);
        },
        "permutations per document in masking mode");
    add_common_options(attribute_cmd, attribute.pending);
    add_plan_options(attribute_cmd, attribute.pending);

    Command eval;
    CLI::App* eval_cmd = app.add_subcommand("eval", "run the fixed-model ablation ladder");
    eval_cmd->add_option("--corpus", eval.corpus_path, "input corpus file")->required();
    eval_cmd->add_option("--pairs", eval.pairs, "matched pairs CSV")->required();
    eval_cmd->add_option("--gender-model", eval.gender_model, "gender model JSON")->required();
    eval_cmd->add_option("--screening-model", eval.screening_model, "screening model JSON")
        ->required();
    eval_cmd->add_option("--ranking", eval.ranking, "feature ranking CSV")->required();
    eval_cmd->add_option("--out", eval.out, "output tradeoff CSV")->required();
    eval.pending.stage(eval_cmd, "--grid", "grid", "ablation ks (counts or % of ranking)");
    eval.pending.stage(eval_cmd, "--format", "format", "csv or jsonl");
    eval.pending.stage_flag(eval_cmd, "--retrain", "retrain",
                            "retrain models per step instead of the fixed-model protocol");
    add_common_options(eval_cmd, eval.pending);
    add_plan_options(eval_cmd, eval.pending);
    add_train_options(eval_cmd, eval.pending);

    Command pipeline;
    CLI::App* pipeline_cmd =
        app.add_subcommand("pipeline", "full workflow: match, train, attribute, ladder");
    pipeline_cmd->add_option("--corpus", pipeline.corpus_path, "input corpus file")->required();
    pipeline_cmd->add_option("--out-dir", pipeline.out_dir, "artifact directory")->required();
    pipeline_cmd->add_option("--config", pipeline.pending.config_file,
                             "key = value config file (flags override it)");
    pipeline.pending.stage(pipeline_cmd, "--grid", "grid",
                           "ablation ks (counts or % of ranking)");
    pipeline.pending.stage(pipeline_cmd, "--format", "format", "csv or jsonl");
    pipeline.pending.stage(pipeline_cmd, "--debias-compare", "debias_compare",
                           "true/false: compare raw vs debiased embedding classifiers");
    pipeline.pending.stage_flag(pipeline_cmd, "--retrain", "retrain",
                                "retrain models per ladder step");
    add_common_options(pipeline_cmd, pipeline.pending);
    add_plan_options(pipeline_cmd, pipeline.pending);
    add_embedding_options(pipeline_cmd, pipeline.pending);
    add_match_options(pipeline_cmd, pipeline.pending);
    add_train_options(pipeline_cmd, pipeline.pending);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    auto with_params = [](Command& cmd, auto&& body) -> int {
        ParamsHandle params;
        if (!params.ptr) return fail(DG_ERR_INTERNAL);
        if (int rc = cmd.pending.apply(params.ptr); rc != 0) return rc;
        return body(params.ptr);
    };

    if (synth_cmd->parsed()) {
        return with_params(synth, [&](dg_params* params) -> int {
            if (dg_status s = dg_run_synth(params, synth.out.c_str()); s != DG_OK) {
                return fail(s);
            }
            std::printf("wrote %s\n", synth.out.c_str());
            return 0;
        });
    }
    if (oracle_cmd->parsed()) {
        return with_params(oracle, [&](dg_params* params) -> int {
            uint64_t n_mc = 0;
            try {
                n_mc = std::stoull(oracle_n_mc);
            } catch (const std::exception&) {
                std::fprintf(stderr, "error: --n-mc must be an integer\n");
                return 1;
            }
            double value = 0.0;
            if (dg_status s = dg_oracle_gender_auroc(params, n_mc, &value); s != DG_OK) {
                return fail(s);
            }
            std::printf("oracle_gender_auroc %.6f\n", value);
            return 0;
        });
    }
    if (redact_cmd->parsed()) {
        return with_params(redact, [&](dg_params* params) -> int {
            CorpusHandle corpus;
            if (int rc = load_corpus_arg(redact.corpus_path, corpus); rc != 0) return rc;
            if (dg_status s = dg_run_redact(corpus.ptr, params, redact.out.c_str());
                s != DG_OK) {
                return fail(s);
            }
            std::printf("wrote %s\n", redact.out.c_str());
            return 0;
        });
    }
    if (match_cmd->parsed()) {
        return with_params(match, [&](dg_params* params) -> int {
            CorpusHandle corpus;
            if (int rc = load_corpus_arg(match.corpus_path, corpus); rc != 0) return rc;
            if (dg_status s = dg_run_match(corpus.ptr, params, match.out.c_str()); s != DG_OK) {
                return fail(s);
            }
            std::printf("wrote %s\n", match.out.c_str());
            return 0;
        });
    }
    if (train_cmd->parsed()) {
        return with_params(train, [&](dg_params* params) -> int {
            CorpusHandle corpus;
            if (int rc = load_corpus_arg(train.corpus_path, corpus); rc != 0) return rc;
            if (dg_status s = dg_run_train(corpus.ptr, params, train.pairs.c_str(),
                                           train.out_dir.c_str());
                s != DG_OK) {
                return fail(s);
            }
            std::printf("wrote models under %s\n", train.out_dir.c_str());
            return 0;
        });
    }
    if (attribute_cmd->parsed()) {
        return with_params(attribute, [&](dg_params* params) -> int {
            CorpusHandle corpus;
            if (int rc = load_corpus_arg(attribute.corpus_path, corpus); rc != 0) return rc;
            if (dg_status s =
                    dg_run_attribute(corpus.ptr, params, attribute.pairs.c_str(),
                                     attribute.gender_model.c_str(), attribute.out.c_str());
                s != DG_OK) {
                return fail(s);
            }
            std::printf("wrote %s\n", attribute.out.c_str());
            return 0;
        });
    }
    if (eval_cmd->parsed()) {
        return with_params(eval, [&](dg_params* params) -> int {
            CorpusHandle corpus;
            if (int rc = load_corpus_arg(eval.corpus_path, corpus); rc != 0) return rc;
            if (dg_status s = dg_run_eval(corpus.ptr, params, eval.pairs.c_str(),
                                          eval.gender_model.c_str(),
                                          eval.screening_model.c_str(), eval.ranking.c_str(),
                                          eval.out.c_str());
                s != DG_OK) {
                return fail(s);
            }
            std::printf("wrote %s\n", eval.out.c_str());
            return 0;
        });
    }
    if (pipeline_cmd->parsed()) {
        return with_params(pipeline, [&](dg_params* params) -> int {
            CorpusHandle corpus;
            if (int rc = load_corpus_arg(pipeline.corpus_path, corpus); rc != 0) return rc;
            if (dg_status s = dg_run_pipeline(corpus.ptr, params, pipeline.out_dir.c_str());
                s != DG_OK) {
                return fail(s);
            }
            std::printf("pipeline artifacts under %s\n", pipeline.out_dir.c_str());
            return 0;
        });
    }
    return 1;
}
