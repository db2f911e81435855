/* degender -- gender obfuscation toolkit for resume corpora.
 *
 * C API of the shared library. All functions return a dg_status; on any
 * non-zero status dg_last_error() holds a thread-local message describing
 * the failure. Handles are opaque and freed with their dg_*_free function.
 *
 * Configuration flows through a dg_params handle holding string key/value
 * pairs (the same keys the CLI flags and key = value config files use).
 * Unset keys fall back to built-in defaults. Frequently used keys:
 *
 *   seed               master seed; per-stage seeds derive from it
 *   jobs               worker threads for per-document stages
 *   data_dir           lexicon directory (beats env DEGENDER_DATA_DIR)
 *   plan               redaction passes: pii,gender_words,hobbies,
 *                      lexicon names, or token_list:PATH entries
 *   lexicon.<name>     path binding for a named lexicon pass
 *   n_resumes, n_jobs, odds, hobby_gender_skew, gender_word_rate,
 *   callback_bias, gendered_names, skill_vocab_size   synthetic generator
 *   dim, window, negatives, epochs, min_count         embedding training
 *   max_experience_gap, min_cosine, same_degree, same_field   matching
 *   alpha_grid, lambda, max_iters, tolerance, min_df  classifier training
 *   grid, retrain, attr_mode, attr_samples            attribution + ladder
 *   format             csv (default) or jsonl for reports
 */
#ifndef DEGENDER_H
#define DEGENDER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dg_status {
    DG_OK = 0,
    DG_ERR_USAGE = 1,    /* invalid argument or violated precondition */
    DG_ERR_DATA = 2,     /* malformed or inconsistent input data */
    DG_ERR_INTERNAL = 3  /* unexpected failure */
} dg_status;

const char* dg_version(void);

/* Message for the most recent failing call on this thread; never NULL. */
const char* dg_last_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct dg_params dg_params;

dg_status dg_params_create(dg_params** out);
void dg_params_free(dg_params* params);
dg_status dg_params_set(dg_params* params, const char* key, const char* value);
/* Effective value (set value or default); NULL for unknown keys, with the
 * reason in dg_last_error(). Returned pointer is owned by the params handle
 * and valid until the next call on it. */
const char* dg_params_get(dg_params* params, const char* key);
/* Merge "key = value" lines from a config file; set() calls override it. */
dg_status dg_params_load_file(dg_params* params, const char* path);

/* ---- corpus handle ----------------------------------------------------- */

typedef struct dg_corpus dg_corpus;

dg_status dg_corpus_load(const char* path, dg_corpus** out);
dg_status dg_corpus_save(const dg_corpus* corpus, const char* path);
void dg_corpus_free(dg_corpus* corpus);
size_t dg_corpus_resumes(const dg_corpus* corpus);
size_t dg_corpus_jobs(const dg_corpus* corpus);
size_t dg_corpus_applications(const dg_corpus* corpus);

/* Deterministic synthetic corpus with planted, parameterized gendered
 * signal (see the synthetic generator keys above). */
dg_status dg_corpus_generate(const dg_params* params, dg_corpus** out);

/* Redacts every resume with the configured plan. */
dg_status dg_corpus_redact(const dg_corpus* corpus, const dg_params* params,
                           dg_corpus** out);

/* Monte-Carlo AUROC of the Bayes-optimal classifier that sees only the
 * planted gendered tokens; n_mc >= 10000. */
dg_status dg_oracle_gender_auroc(const dg_params* params, uint64_t n_mc, double* out);

/* ---- stage runners ------------------------------------------------------
 * Each writes its artifacts plus a manifest (command, resolved config, seed,
 * input hashes). Outputs are byte-identical across reruns with equal inputs.
 */

/* generate + write a corpus file */
dg_status dg_run_synth(const dg_params* params, const char* out_corpus_path);

/* redact a corpus file to a new corpus file */
dg_status dg_run_redact(const dg_corpus* corpus, const dg_params* params,
                        const char* out_corpus_path);

/* embeddings + resume vectors + greedy 1-1 matching; writes the pairs CSV */
dg_status dg_run_match(const dg_corpus* corpus, const dg_params* params,
                       const char* out_pairs_csv);

/* gender + screening models from the matched sample; writes
 * gender_model.json, screening_model.json and splits.csv under out_dir */
dg_status dg_run_train(const dg_corpus* corpus, const dg_params* params,
                       const char* pairs_csv, const char* out_dir);

/* feature attribution ranking CSV for a trained gender model */
dg_status dg_run_attribute(const dg_corpus* corpus, const dg_params* params,
                           const char* pairs_csv, const char* gender_model_json,
                           const char* out_ranking_csv);

/* fixed-model ablation ladder; writes the tradeoff CSV */
dg_status dg_run_eval(const dg_corpus* corpus, const dg_params* params,
                      const char* pairs_csv, const char* gender_model_json,
                      const char* screening_model_json, const char* ranking_csv,
                      const char* out_tradeoff_csv);

/* match -> split -> redact -> train -> attribute -> ladder -> tradeoff, all
 * artifacts under out_dir; a failing stage leaves out_dir/FAILED naming it */
dg_status dg_run_pipeline(const dg_corpus* corpus, const dg_params* params,
                          const char* out_dir);

/* ---- direct utilities --------------------------------------------------- */

/* Mann-Whitney AUROC with half tie credit; labels are 0/1 and both classes
 * must be present. */
dg_status dg_auroc(const double* scores, const int32_t* labels, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* DEGENDER_H */
