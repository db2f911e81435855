#pragma once

#include <map>
#include <string>

#include "degender/corpus.hpp"
#include "degender/lexicon.hpp"
#include "degender/params.hpp"
#include "degender/pii.hpp"
#include "degender/synth.hpp"

namespace degender {

struct LoadedCorpus {
    Corpus corpus;
    std::string source_path;  // "<generated>" for in-memory corpora
    std::string source_hash;
};

LoadedCorpus load_corpus_file(const std::string& path);

// --data-dir flag beats the DEGENDER_DATA_DIR environment variable beats the
// compiled-in bundle location.
std::string resolve_data_dir(const Params& params);

SynthConfig synth_config_from_params(const Params& params);

// Bundled-aware plan resolution: named lexicon passes load from
// lexicon.<name> bindings or <data_dir>/<name>.txt, token_list passes load
// their path directly, and the pii pass uses the bundled first-name lists.
struct PlanContext {
    RedactionPlan plan;
    std::map<std::string, Lexicon> lexicons;
    PiiRedactor pii;
    std::map<std::string, std::string> input_hashes;  // files backing the plan
};
PlanContext resolve_plan(const Params& params, const std::string& plan_spec);

// Stage runners behind the CLI subcommands. Every runner writes its outputs
// plus a manifest; all randomness derives from the "seed" parameter.
void run_synth(const Params& params, const std::string& out_path);
void run_redact(const LoadedCorpus& input, const Params& params, const std::string& out_path);
void run_match(const LoadedCorpus& input, const Params& params,
               const std::string& out_pairs_csv);
void run_train(const LoadedCorpus& input, const Params& params, const std::string& pairs_csv,
               const std::string& out_dir);
void run_attribute(const LoadedCorpus& input, const Params& params,
                   const std::string& pairs_csv, const std::string& gender_model_path,
                   const std::string& out_ranking_csv);
void run_eval(const LoadedCorpus& input, const Params& params, const std::string& pairs_csv,
              const std::string& gender_model_path, const std::string& screening_model_path,
              const std::string& ranking_csv, const std::string& out_tradeoff_csv);

// match -> split -> redact -> train -> attribute -> ladder -> tradeoff, every
// intermediate artifact written under out_dir. A failing stage leaves a
// FAILED marker naming itself and rethrows.
void run_pipeline(const LoadedCorpus& input, const Params& params, const std::string& out_dir);

double run_oracle(const Params& params, size_t n_mc);

}  // namespace degender
