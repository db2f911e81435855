#include "doctest.h"

#include <filesystem>
#include <string>

#include "json.hpp"

#include "degender/attribution.hpp"
#include "degender/errors.hpp"
#include "degender/evaluation.hpp"
#include "degender/manifest.hpp"
#include "degender/params.hpp"
#include "degender/pipeline.hpp"
#include "degender/synth.hpp"
#include "degender/util.hpp"

using namespace degender;
namespace fs = std::filesystem;

namespace {

const char* kDataDir = DEGENDER_TEST_DATA_DIR;

std::string work_dir() {
    static std::string dir = [] {
        std::string d = (fs::temp_directory_path() / "degender_pipeline_tests").string();
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Params small_params() {
    Params p;
    p.set("data_dir", kDataDir);
    p.set("seed", "7");
    p.set("n_resumes", "600");
    p.set("hobby_gender_skew", "0.5");
    p.set("gender_word_rate", "0.3");
    p.set("dim", "24");
    p.set("window", "3");
    p.set("epochs", "3");
    p.set("min_count", "3");
    p.set("min_df", "3");
    p.set("min_cosine", "0.3");
    p.set("max_iters", "150");
    p.set("grid", "5,25,50%");
    p.set("alpha_grid", "1e-4,1e-2");
    return p;
}

const std::string& corpus_path() {
    static std::string path = [] {
        std::string p = work_dir() + "/corpus.jsonl";
        run_synth(small_params(), p);
        return p;
    }();
    return path;
}

}  // namespace

TEST_CASE("params registry: unknown keys rejected, defaults resolved") {
    Params p;
    CHECK_THROWS_AS(p.set("no_such_key", "1"), UsageError);
    CHECK(p.get("seed") == "42");
    p.set("seed", "9");
    CHECK(p.get_u64("seed") == 9);
    p.set("lexicon.custom", "/tmp/custom.txt");
    CHECK(p.get("lexicon.custom") == "/tmp/custom.txt");
    CHECK(p.effective().at("plan") == "pii,gender_words,hobbies");
    CHECK_THROWS_AS(p.get_bool("seed"), UsageError);
}

TEST_CASE("params config file: parsed and overridable") {
    std::string path = work_dir() + "/config.txt";
    write_file(path, "# comment\nseed = 11\nn_resumes = 50\n");
    Params file = Params::from_file(path);
    CHECK(file.get_u64("seed") == 11);
    Params overrides;
    overrides.set("seed", "12");
    file.merge(overrides);
    CHECK(file.get_u64("seed") == 12);
    CHECK(file.get_size("n_resumes") == 50);

    write_file(path, "bad line without equals\n");
    CHECK_THROWS_AS(Params::from_file(path), DataError);
}

TEST_CASE("run_synth: deterministic corpus file plus manifest") {
    Params p = small_params();
    std::string a = work_dir() + "/synth_a.jsonl";
    std::string b = work_dir() + "/synth_b.jsonl";
    run_synth(p, a);
    run_synth(p, b);
    CHECK(read_file(a) == read_file(b));
    CHECK(file_exists(a + ".manifest.json"));

    nlohmann::json manifest = nlohmann::json::parse(read_file(a + ".manifest.json"));
    CHECK(manifest.at("command") == "synth");
    CHECK(manifest.at("seed") == 7);
    CHECK(manifest.at("config_echo").at("n_resumes") == "600");
    CHECK(manifest.at("input_hashes").size() == 2);  // the two name lists
}

TEST_CASE("run_synth: no-signal corpus scores near chance downstream") {
    Params p = small_params();
    p.set("odds", "none");
    p.set("gendered_names", "false");
    p.set("hobby_gender_skew", "0");
    p.set("gender_word_rate", "0");
    p.set("callback_bias", "0");
    std::string corpus_file = work_dir() + "/no_signal.jsonl";
    run_synth(p, corpus_file);
    LoadedCorpus corpus = load_corpus_file(corpus_file);
    std::string out_dir = work_dir() + "/no_signal_run";
    p.set("grid", "5");
    run_pipeline(corpus, p, out_dir);
    std::vector<LadderRow> rows = parse_tradeoff(out_dir + "/tradeoff.csv");
    REQUIRE(!rows.empty());
    CHECK(rows[0].gender_auroc > 0.35);
    CHECK(rows[0].gender_auroc < 0.65);
}

TEST_CASE("run_pipeline: artifacts, ladder shape, and determinism") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    std::string dir_a = work_dir() + "/run_a";
    std::string dir_b = work_dir() + "/run_b";
    run_pipeline(corpus, p, dir_a);
    run_pipeline(corpus, p, dir_b);

    for (const char* artifact :
         {"embeddings.vec", "pairs.csv", "splits.csv", "redacted.jsonl", "gender_model.json",
          "screening_model.json", "screening_scores.csv", "ranking.csv", "tradeoff.csv",
          "embedding_compare.csv", "embeddings_debiased.vec", "manifest.json"}) {
        CHECK_MESSAGE(file_exists(dir_a + "/" + artifact), "missing artifact ", artifact);
    }
    CHECK_FALSE(file_exists(dir_a + "/FAILED"));

    // byte-identical rerun
    CHECK(read_file(dir_a + "/tradeoff.csv") == read_file(dir_b + "/tradeoff.csv"));
    CHECK(read_file(dir_a + "/ranking.csv") == read_file(dir_b + "/ranking.csv"));
    CHECK(read_file(dir_a + "/pairs.csv") == read_file(dir_b + "/pairs.csv"));
    CHECK(read_file(dir_a + "/manifest.json") == read_file(dir_b + "/manifest.json"));

    std::vector<LadderRow> rows = parse_tradeoff(dir_a + "/tradeoff.csv");
    REQUIRE(rows.size() >= 3);
    CHECK(rows[0].k_removed == 0);
    CHECK(rows[0].experiment_label == "base");
    for (const LadderRow& row : rows) {
        CHECK(row.gender_auroc >= 0.0);
        CHECK(row.gender_auroc <= 1.0);
        CHECK(row.screening_auroc.has_value());
    }
    // planted signal makes the base row clearly informative
    CHECK(rows[0].gender_auroc > 0.6);
}

TEST_CASE("run_pipeline: stage isolation equals the chained stage commands") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    std::string staged = work_dir() + "/staged";
    fs::create_directories(staged);

    run_match(corpus, p, staged + "/pairs.csv");
    run_train(corpus, p, staged + "/pairs.csv", staged);
    run_attribute(corpus, p, staged + "/pairs.csv", staged + "/gender_model.json",
                  staged + "/ranking.csv");
    run_eval(corpus, p, staged + "/pairs.csv", staged + "/gender_model.json",
             staged + "/screening_model.json", staged + "/ranking.csv",
             staged + "/tradeoff.csv");

    std::string reference = work_dir() + "/run_a";
    CHECK(read_file(staged + "/pairs.csv") == read_file(reference + "/pairs.csv"));
    CHECK(read_file(staged + "/gender_model.json") ==
          read_file(reference + "/gender_model.json"));
    CHECK(read_file(staged + "/ranking.csv") == read_file(reference + "/ranking.csv"));
    CHECK(read_file(staged + "/tradeoff.csv") == read_file(reference + "/tradeoff.csv"));
}

TEST_CASE("run_pipeline: manifest fidelity reproduces identical outputs") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    std::string reference = work_dir() + "/run_a";
    nlohmann::json manifest = nlohmann::json::parse(read_file(reference + "/manifest.json"));
    Params rebuilt;
    for (const auto& [key, value] : manifest.at("config_echo").items()) {
        rebuilt.set(key, value.get<std::string>());
    }
    std::string dir = work_dir() + "/from_manifest";
    run_pipeline(corpus, rebuilt, dir);
    CHECK(read_file(dir + "/tradeoff.csv") == read_file(reference + "/tradeoff.csv"));
}

TEST_CASE("run_pipeline: a failing stage leaves a FAILED marker naming it") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    p.set("plan", "pii,no_such_lexicon");
    std::string dir = work_dir() + "/failing_run";
    CHECK_THROWS_AS(run_pipeline(corpus, p, dir), DataError);
    REQUIRE(file_exists(dir + "/FAILED"));
    std::string marker = read_file(dir + "/FAILED");
    CHECK(marker.find("plan") != std::string::npos);
}

TEST_CASE("run_redact: corpus-to-corpus with only raw_text changed") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    std::string out = work_dir() + "/redacted_corpus.jsonl";
    run_redact(corpus, p, out);
    LoadedCorpus redacted = load_corpus_file(out);
    REQUIRE(redacted.corpus.resumes.size() == corpus.corpus.resumes.size());
    for (size_t i = 0; i < corpus.corpus.resumes.size(); ++i) {
        const Resume& before = corpus.corpus.resumes[i];
        const Resume& after = redacted.corpus.resumes[i];
        CHECK(before.id == after.id);
        CHECK(before.applicant_name == after.applicant_name);
        CHECK(before.gender == after.gender);
        // every resume carries a planted name line, so something was redacted
        CHECK(after.raw_text.find("[DEL]") != std::string::npos);
    }
    CHECK(file_exists(out + ".manifest.json"));
}

TEST_CASE("oracle runner matches the library oracle") {
    Params p = small_params();
    p.set("odds", "softball=9");
    double via_params = run_oracle(p, 20000);
    SynthConfig cfg = synth_config_from_params(p);
    CHECK(via_params == oracle_gender_auroc(cfg, 20000));
    CHECK(via_params > 0.6);
    CHECK(via_params < 0.8);
}

TEST_CASE("resolve_plan: custom lexicon bindings and token lists") {
    std::string custom = work_dir() + "/custom_lexicon.txt";
    write_file(custom, "zeta\n");
    std::string token_list = work_dir() + "/token_list.csv";
    write_file(token_list, "token,mean_abs,signed_mean,direction\nomega,1,1,male_leaning\n");

    Params p;
    p.set("data_dir", kDataDir);
    p.set("lexicon.custom", custom);
    PlanContext ctx = resolve_plan(p, "pii,gender_words,custom,token_list:" + token_list);
    CHECK(ctx.plan.passes.size() == 4);
    CHECK(ctx.lexicons.at("custom").contains_token("zeta"));
    CHECK(ctx.lexicons.at("token_list:" + token_list).contains_token("omega"));
    CHECK(ctx.lexicons.at("gender_words").contains_token("waitress"));
    CHECK(ctx.pii.first_names().count("james") == 1);
}

TEST_CASE("run_pipeline: results independent of the worker count") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    p.set("jobs", "3");
    std::string dir = work_dir() + "/run_jobs3";
    run_pipeline(corpus, p, dir);
    // jobs is part of the config echo, so compare artifacts rather than manifests
    CHECK(read_file(dir + "/tradeoff.csv") == read_file(work_dir() + "/run_a/tradeoff.csv"));
    CHECK(read_file(dir + "/ranking.csv") == read_file(work_dir() + "/run_a/ranking.csv"));
}

TEST_CASE("run_attribute: masking mode ranks the planted markers high") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    p.set("attr_mode", "masking");
    p.set("attr_samples", "6");
    std::string staged = work_dir() + "/staged";  // pairs from the stage-isolation test
    std::string ranking_path = work_dir() + "/ranking_masking.csv";
    run_attribute(corpus, p, staged + "/pairs.csv", staged + "/gender_model.json",
                  ranking_path);
    FeatureRanking ranking = load_ranking(ranking_path);
    REQUIRE(!ranking.entries.empty());
    std::set<std::string> top;
    for (size_t i = 0; i < std::min<size_t>(30, ranking.entries.size()); ++i) {
        top.insert(ranking.entries[i].token);
    }
    size_t markers_in_top = 0;
    for (const auto& [token, odds] : demo_token_odds()) markers_in_top += top.count(token);
    CHECK(markers_in_top >= 10);

    Params bad = small_params();
    bad.set("attr_mode", "nonsense");
    CHECK_THROWS_AS(run_attribute(corpus, bad, staged + "/pairs.csv",
                                  staged + "/gender_model.json", ranking_path),
                    UsageError);
}

TEST_CASE("run_eval: the retrain extension is labeled and shaped like the ladder") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    p.set("retrain", "true");
    p.set("grid", "5");
    std::string staged = work_dir() + "/staged";
    std::string out = work_dir() + "/tradeoff_retrain.csv";
    run_eval(corpus, p, staged + "/pairs.csv", staged + "/gender_model.json",
             staged + "/screening_model.json", staged + "/ranking.csv", out);
    std::vector<LadderRow> rows = parse_tradeoff(out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].experiment_label == "retrain");
    CHECK(rows[1].experiment_label == "retrain+top_5");
}

TEST_CASE("run_match: pre-trained vectors replace embedding training") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    std::string vectors_path = work_dir() + "/run_a/embeddings.vec";
    p.set("vectors", vectors_path);
    std::string out = work_dir() + "/pairs_pretrained.csv";
    run_match(corpus, p, out);
    // same vectors as the trained run, so the same pairs come out
    CHECK(read_file(out) == read_file(work_dir() + "/run_a/pairs.csv"));
    nlohmann::json manifest = nlohmann::json::parse(read_file(out + ".manifest.json"));
    CHECK(manifest.at("input_hashes").contains(vectors_path));
}

TEST_CASE("splits.csv: matched-pair slices stay gender balanced") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    std::map<std::string, Gender> gender_of;
    for (const Resume& r : corpus.corpus.resumes) gender_of[r.id] = r.gender;
    std::string text = read_file(work_dir() + "/run_a/splits.csv");
    std::map<std::string, std::pair<long, long>> counts;  // slice -> (male, female)
    std::vector<std::string> lines = split(text, '\n');
    REQUIRE(trim(lines[0]) == "resume_id,slice");
    for (size_t i = 1; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty()) continue;
        std::vector<std::string> cols = split(line, ',');
        REQUIRE(cols.size() == 2);
        auto& [males, females] = counts[cols[1]];
        (gender_of.at(cols[0]) == Gender::Male ? males : females) += 1;
    }
    REQUIRE(counts.size() == 3);
    for (const auto& [slice, tally] : counts) {
        CHECK(tally.first == tally.second);
        CHECK(tally.first > 0);
    }
}

TEST_CASE("run_pipeline: adding the gender-word pass cannot raise the base auroc") {
    LoadedCorpus corpus = load_corpus_file(corpus_path());
    Params p = small_params();
    p.set("grid", "5");
    p.set("plan", "pii");
    std::string dir_pii = work_dir() + "/plan_pii";
    run_pipeline(corpus, p, dir_pii);
    p.set("plan", "pii,gender_words");
    std::string dir_both = work_dir() + "/plan_pii_gw";
    run_pipeline(corpus, p, dir_both);

    double base_pii = parse_tradeoff(dir_pii + "/tradeoff.csv")[0].gender_auroc;
    double base_both = parse_tradeoff(dir_both + "/tradeoff.csv")[0].gender_auroc;
    CHECK(base_both <= base_pii + 0.02);
}
