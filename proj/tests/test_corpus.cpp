#include "doctest.h"

#include "degender/corpus.hpp"
#include "degender/errors.hpp"
#include "degender/util.hpp"

using namespace degender;

namespace {

Resume sample_resume(const std::string& id) {
    Resume r;
    r.id = id;
    r.applicant_name = "john doe";
    r.gender = Gender::Male;
    r.years_experience = 5;
    r.degree = Degree::Bachelors;
    r.field_of_study = FieldOfStudy::Technical;
    r.raw_text = "john doe\nexperience\npython sql";
    return r;
}

JobPosting sample_job(const std::string& id) {
    JobPosting j;
    j.id = id;
    j.company = "company x";
    j.job_name = "software engineer";
    j.business_unit = "engineering";
    j.employment_type = "fulltime";
    j.location = "san francisco, ca";
    j.skills = {"c", "python"};
    j.keywords = {"web"};
    j.source = "jobsite";
    return j;
}

}  // namespace

TEST_CASE("load_corpus: empty input gives three empty lists") {
    Corpus c = corpus_from_jsonl("");
    CHECK(c.resumes.empty());
    CHECK(c.jobs.empty());
    CHECK(c.applications.empty());
}

TEST_CASE("load_corpus: minimal well-formed corpus") {
    Corpus c;
    c.resumes.push_back(sample_resume("R1"));
    c.jobs.push_back(sample_job("J1"));
    c.applications.push_back({"R1", "J1", true});
    Corpus loaded = corpus_from_jsonl(corpus_to_jsonl(c));
    CHECK(loaded.resumes.size() == 1);
    CHECK(loaded.jobs.size() == 1);
    CHECK(loaded.applications.size() == 1);
}

TEST_CASE("load_corpus: dangling job reference names the id") {
    Corpus c;
    c.resumes.push_back(sample_resume("R1"));
    c.jobs.push_back(sample_job("J1"));
    c.applications.push_back({"R1", "J99", false});
    std::string jsonl = corpus_to_jsonl(c);
    CHECK_THROWS_WITH_AS(corpus_from_jsonl(jsonl),
                         doctest::Contains("J99"), DataError);
}

TEST_CASE("load_corpus: malformed line names the line number and field") {
    std::string jsonl = R"({"kind":"resume","id":"R1"})";
    try {
        corpus_from_jsonl(jsonl);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string what = e.what();
        CHECK(what.find("line 1") != std::string::npos);
        CHECK(what.find("applicant_name") != std::string::npos);
    }

    CHECK_THROWS_AS(corpus_from_jsonl("not json"), DataError);
}

TEST_CASE("load_corpus: duplicate ids and duplicate applications rejected") {
    Corpus c;
    c.resumes.push_back(sample_resume("R1"));
    c.resumes.push_back(sample_resume("R1"));
    CHECK_THROWS_AS(validate_corpus(c), DataError);

    Corpus d;
    d.resumes.push_back(sample_resume("R1"));
    d.jobs.push_back(sample_job("J1"));
    d.applications.push_back({"R1", "J1", true});
    d.applications.push_back({"R1", "J1", false});
    CHECK_THROWS_AS(validate_corpus(d), DataError);
}

TEST_CASE("load_corpus: years_experience over 80 rejected") {
    Resume r = sample_resume("R1");
    r.years_experience = 81;
    Corpus c;
    c.resumes.push_back(r);
    CHECK_THROWS_AS(validate_corpus(c), DataError);
}

TEST_CASE("corpus round-trip is structurally exact") {
    Corpus c;
    c.resumes.push_back(sample_resume("R1"));
    Resume second = sample_resume("R2");
    second.gender = Gender::Female;
    second.applicant_name = "jane roe";
    second.raw_text = "jane roe\nskills\nexcel";
    c.resumes.push_back(second);
    c.jobs.push_back(sample_job("J1"));
    JobPosting no_source = sample_job("J2");
    no_source.source.clear();
    c.jobs.push_back(no_source);
    c.applications.push_back({"R1", "J1", true});
    c.applications.push_back({"R2", "J2", false});

    std::string once = corpus_to_jsonl(c);
    Corpus loaded = corpus_from_jsonl(once);
    CHECK(corpus_to_jsonl(loaded) == once);
    CHECK(loaded.jobs[1].source.empty());
    CHECK(loaded.resumes[1].gender == Gender::Female);
}

TEST_CASE("enum serialization round-trips") {
    for (Degree d : {Degree::Associate, Degree::Bachelors, Degree::Masters, Degree::Doctorate}) {
        CHECK(degree_from_string(to_string(d)) == d);
    }
    for (FieldOfStudy f : {FieldOfStudy::Technical, FieldOfStudy::Science,
                           FieldOfStudy::Business, FieldOfStudy::Law, FieldOfStudy::Other}) {
        CHECK(field_from_string(to_string(f)) == f);
    }
    CHECK_THROWS_AS(gender_from_string("other"), DataError);
}
