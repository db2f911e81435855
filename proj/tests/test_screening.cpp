#include "doctest.h"

#include <cmath>
#include <set>

#include "degender/errors.hpp"
#include "degender/evaluation.hpp"
#include "degender/rng.hpp"
#include "degender/screening.hpp"
#include "degender/util.hpp"

using namespace degender;

namespace {

Resume resume_of(const std::string& id, const std::string& text, Gender g = Gender::Male) {
    Resume r;
    r.id = id;
    r.applicant_name = "pat quill";
    r.gender = g;
    r.raw_text = text;
    return r;
}

JobPosting job_of(const std::string& id) {
    JobPosting j;
    j.id = id;
    j.company = "company x";
    j.job_name = "software engineer";
    j.business_unit = "engineering";
    j.employment_type = "fulltime";
    j.location = "san francisco, ca";
    j.skills = {"c", "python"};
    j.keywords = {"web development"};
    j.source = "jobsite";
    return j;
}

}  // namespace

TEST_CASE("assemble_document: section order and the ats-style blocks") {
    std::string doc = assemble_document(resume_of("R1", "body text"), job_of("J1"));
    CHECK(doc.find("job_loc=\nsan francisco, ca") != std::string::npos);
    CHECK(doc.find("job_skills=\nc, python, web development") != std::string::npos);
    CHECK(doc.find("employment_type=\nfulltime") != std::string::npos);
    CHECK(doc.find("source=\njobsite") != std::string::npos);
    size_t resume_at = doc.find("resume=\n");
    REQUIRE(resume_at != std::string::npos);
    CHECK(doc.find("job_loc=") < resume_at);
    CHECK(doc.find("job_skills=") < resume_at);
    CHECK(doc.rfind("body text") > resume_at);
    CHECK(doc.rfind("company x", 0) == 0);
}

TEST_CASE("assemble_document: empty skills keep the layout stable, source is optional") {
    JobPosting job = job_of("J1");
    job.skills.clear();
    job.keywords.clear();
    job.source.clear();
    std::string doc = assemble_document(resume_of("R1", "text"), job);
    CHECK(doc.find("job_skills=\n\nemployment_type=") != std::string::npos);
    CHECK(doc.find("source=") == std::string::npos);

    AssembledSections sections = parse_assembled_document(doc);
    CHECK(sections.job_skills.empty());
    CHECK_FALSE(sections.source.has_value());
}

TEST_CASE("assemble_document: round-trip recovers every section") {
    Rng rng(77);
    std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "epsilon"};
    auto random_field = [&](bool allow_newline) {
        std::string out;
        size_t len = 1 + rng.uniform_index(4);
        for (size_t i = 0; i < len; ++i) {
            if (i) out += allow_newline && rng.bernoulli(0.3) ? "\n" : " ";
            out += words[rng.uniform_index(words.size())];
        }
        return out;
    };
    for (int round = 0; round < 60; ++round) {
        JobPosting job = job_of("J1");
        job.company = random_field(false);
        job.location = random_field(false);
        job.employment_type = random_field(false);
        job.source = rng.bernoulli(0.5) ? random_field(false) : "";
        job.skills.clear();
        job.keywords.clear();
        size_t n_skills = rng.uniform_index(4);
        for (size_t i = 0; i < n_skills; ++i) job.skills.push_back(words[rng.uniform_index(5)]);
        Resume r = resume_of("R1", random_field(true) + "\n" + random_field(true));

        std::string doc = assemble_document(r, job);
        AssembledSections sections = parse_assembled_document(doc);
        CHECK(sections.company == job.company);
        CHECK(sections.job_loc == job.location);
        CHECK(sections.employment_type == job.employment_type);
        if (job.source.empty()) {
            CHECK_FALSE(sections.source.has_value());
        } else {
            CHECK(sections.source.value() == job.source);
        }
        CHECK(sections.resume_text == r.raw_text);
        // duplicate skills merge once; otherwise the joined list round-trips
        std::vector<std::string> expected;
        for (const std::string& s : job.skills) {
            if (std::find(expected.begin(), expected.end(), s) == expected.end()) {
                expected.push_back(s);
            }
        }
        CHECK(sections.job_skills == join(expected, ", "));
    }
}

TEST_CASE("train_screening: callback ruled by one skill token is learnable") {
    Rng rng(55);
    Corpus corpus;
    corpus.jobs.push_back(job_of("J1"));
    std::vector<ScreeningInstance> train_instances, test_instances;
    for (int i = 0; i < 400; ++i) {
        bool has_sql = rng.bernoulli(0.5);
        std::string text = "experience\n";
        for (int w = 0; w < 10; ++w) {
            text += (rng.bernoulli(0.5) ? "managed " : "delivered ");
        }
        text += "\nskills\n";
        text += has_sql ? "sql, excel" : "excel, word";
        Resume r = resume_of("R" + std::to_string(i), text);
        ScreeningInstance inst;
        inst.application = {r.id, "J1", has_sql};
        inst.document = assemble_document(r, corpus.jobs[0]);
        inst.label = has_sql;
        (i < 300 ? train_instances : test_instances).push_back(inst);
    }
    TrainConfig cfg;
    cfg.alpha = 1e-4;
    cfg.max_iters = 300;
    ModelBundle bundle = train_screening(train_instances, cfg, 2);

    std::vector<double> scores;
    std::vector<int> labels;
    for (const ScreeningInstance& inst : test_instances) {
        scores.push_back(
            predict_proba(bundle.model, bundle.vectorizer.transform(tokenize(inst.document))));
        labels.push_back(inst.label ? 1 : 0);
    }
    CHECK(auroc(scores, labels) >= 0.95);
}

TEST_CASE("train_screening: shuffled labels give chance-level auroc") {
    Rng rng(56);
    Corpus corpus;
    corpus.jobs.push_back(job_of("J1"));
    std::vector<ScreeningInstance> train_instances, test_instances;
    std::vector<std::string> vocab = {"managed", "delivered", "sql", "excel",
                                      "word",    "python",    "team"};
    for (int i = 0; i < 400; ++i) {
        std::string text = "skills\n";
        for (int w = 0; w < 12; ++w) text += vocab[rng.uniform_index(vocab.size())] + " ";
        Resume r = resume_of("R" + std::to_string(i), text);
        ScreeningInstance inst;
        bool label = rng.bernoulli(0.5);  // independent of the text
        inst.application = {r.id, "J1", label};
        inst.document = assemble_document(r, corpus.jobs[0]);
        inst.label = label;
        (i < 300 ? train_instances : test_instances).push_back(inst);
    }
    TrainConfig cfg;
    cfg.alpha = 1e-3;
    cfg.max_iters = 200;
    ModelBundle bundle = train_screening(train_instances, cfg, 2);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const ScreeningInstance& inst : test_instances) {
        scores.push_back(
            predict_proba(bundle.model, bundle.vectorizer.transform(tokenize(inst.document))));
        labels.push_back(inst.label ? 1 : 0);
    }
    double value = auroc(scores, labels);
    CHECK(value > 0.40);
    CHECK(value < 0.60);
}

TEST_CASE("train_screening: single-class callbacks are rejected") {
    Corpus corpus;
    corpus.jobs.push_back(job_of("J1"));
    std::vector<ScreeningInstance> instances;
    for (int i = 0; i < 4; ++i) {
        Resume r = resume_of("R" + std::to_string(i), "skills\nsql excel word python team");
        ScreeningInstance inst;
        inst.application = {r.id, "J1", true};
        inst.document = assemble_document(r, corpus.jobs[0]);
        inst.label = true;
        instances.push_back(inst);
    }
    CHECK_THROWS_AS(train_screening(instances, TrainConfig{}, 1), DataError);
}

TEST_CASE("score_applications: no plan equals direct scoring; no-op plans change nothing") {
    Rng rng(57);
    Corpus corpus;
    corpus.jobs.push_back(job_of("J1"));
    std::vector<ScreeningInstance> instances;
    for (int i = 0; i < 60; ++i) {
        bool has_sql = i % 2 == 0;
        Resume r = resume_of("R" + std::to_string(i),
                             std::string("skills\n") + (has_sql ? "sql excel" : "word excel"));
        corpus.resumes.push_back(r);
        corpus.applications.push_back({r.id, "J1", has_sql});
        ScreeningInstance inst;
        inst.application = corpus.applications.back();
        inst.document = assemble_document(r, corpus.jobs[0]);
        inst.label = has_sql;
        instances.push_back(inst);
    }
    TrainConfig cfg;
    cfg.alpha = 1e-4;
    ModelBundle bundle = train_screening(instances, cfg, 1);

    std::vector<ApplicationScore> plain =
        score_applications(bundle, corpus, corpus.applications, nullptr, nullptr, nullptr);
    for (size_t i = 0; i < plain.size(); ++i) {
        double direct = predict_proba(
            bundle.model, bundle.vectorizer.transform(tokenize(instances[i].document)));
        CHECK(plain[i].score == direct);
    }

    // a plan redacting a token absent from every resume changes nothing
    RedactionPlan plan = RedactionPlan::parse("absent_tokens");
    std::map<std::string, Lexicon> lexicons;
    lexicons.emplace("absent_tokens",
                     Lexicon::from_entries("absent_tokens", std::vector<std::string>{"zzzz"}));
    PiiRedactor pii({});
    std::vector<ApplicationScore> redacted =
        score_applications(bundle, corpus, corpus.applications, &plan, &lexicons, &pii);
    for (size_t i = 0; i < plain.size(); ++i) CHECK(redacted[i].score == plain[i].score);
}

TEST_CASE("score_applications: redacting the whole vocabulary leaves the bias-only score") {
    Corpus corpus;
    corpus.jobs.push_back(job_of("J1"));
    // job fields are never redacted, so the job must contribute no vocabulary
    JobPosting& job = corpus.jobs[0];
    job.company = "x";
    job.location = "y";
    job.skills.clear();
    job.keywords.clear();
    job.employment_type = "z";
    job.source.clear();
    std::vector<ScreeningInstance> instances;
    for (int i = 0; i < 40; ++i) {
        bool label = i % 2 == 0;
        Resume r = resume_of("R" + std::to_string(i),
                             std::string("alpha beta ") + (label ? "sql" : "word"));
        corpus.resumes.push_back(r);
        corpus.applications.push_back({r.id, "J1", label});
        ScreeningInstance inst;
        inst.application = corpus.applications.back();
        inst.document = assemble_document(r, job);
        inst.label = label;
        instances.push_back(inst);
    }
    TrainConfig cfg;
    cfg.alpha = 1e-4;
    ModelBundle bundle = train_screening(instances, cfg, 1);

    RedactionPlan plan = RedactionPlan::parse("everything");
    std::map<std::string, Lexicon> lexicons;
    lexicons.emplace("everything",
                     Lexicon::from_entries("everything", bundle.vectorizer.tokens()));
    PiiRedactor pii({});
    std::vector<ApplicationScore> scores =
        score_applications(bundle, corpus, corpus.applications, &plan, &lexicons, &pii);
    double bias_only = 1.0 / (1.0 + std::exp(-bundle.model.bias));
    for (const ApplicationScore& s : scores) {
        CHECK(s.score == doctest::Approx(bias_only).epsilon(1e-9));
    }
}

TEST_CASE("score_applications: job fields are immune to redaction plans") {
    Corpus corpus;
    corpus.jobs.push_back(job_of("J1"));
    Resume r = resume_of("R1", "python developer");
    corpus.resumes.push_back(r);
    corpus.applications.push_back({"R1", "J1", true});

    // redact "python" from resumes; the job's own skills keep mentioning c/python
    RedactionPlan plan = RedactionPlan::parse("strip");
    std::map<std::string, Lexicon> lexicons;
    lexicons.emplace("strip", Lexicon::from_entries("strip", std::vector<std::string>{"python"}));
    PiiRedactor pii({});
    Resume redacted = apply_plan(r, plan, lexicons, pii);
    std::string doc = assemble_document(redacted, corpus.jobs[0]);
    AssembledSections sections = parse_assembled_document(doc);
    CHECK(sections.job_skills == "c, python, web development");
    CHECK(sections.resume_text.find("python") == std::string::npos);
    CHECK(sections.resume_text.find("[DEL]") != std::string::npos);
}

TEST_CASE("scores csv format") {
    std::vector<ApplicationScore> scores = {{{"R1", "J1", true}, 0.75},
                                            {{"R2", "J1", false}, 0.25}};
    std::string path = "scores_format_test.csv";
    save_scores(scores, path);
    std::string text = read_file(path);
    CHECK(text.rfind("resume_id,job_id,score,callback\n", 0) == 0);
    CHECK(text.find("R1,J1,0.75,1\n") != std::string::npos);
    CHECK(text.find("R2,J1,0.25,0\n") != std::string::npos);
    std::remove(path.c_str());
}
