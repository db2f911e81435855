#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace degender {

enum class Gender { Male, Female };
enum class Degree { Associate, Bachelors, Masters, Doctorate };
enum class FieldOfStudy { Technical, Science, Business, Law, Other };

std::string to_string(Gender g);
std::string to_string(Degree d);
std::string to_string(FieldOfStudy f);
Gender gender_from_string(const std::string& s);
Degree degree_from_string(const std::string& s);
FieldOfStudy field_from_string(const std::string& s);

struct Resume {
    std::string id;
    std::string applicant_name;
    Gender gender = Gender::Male;
    uint32_t years_experience = 0;
    Degree degree = Degree::Bachelors;
    FieldOfStudy field_of_study = FieldOfStudy::Other;
    std::string raw_text;
};

struct JobPosting {
    std::string id;
    std::string company;
    std::string job_name;
    std::string business_unit;
    std::string employment_type;
    std::string location;
    std::vector<std::string> skills;
    std::vector<std::string> keywords;
    std::string source;  // optional ATS passthrough; empty when absent
};

struct Application {
    std::string resume_id;
    std::string job_id;
    bool callback = false;
};

struct Corpus {
    std::vector<Resume> resumes;
    std::vector<JobPosting> jobs;
    std::vector<Application> applications;
};

// One JSON object per line with a "kind" discriminator
// (resume | job | application); field names match the struct members.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

std::string corpus_to_jsonl(const Corpus& corpus);
Corpus corpus_from_jsonl(std::string_view text);

// Referential integrity plus per-record invariants; throws DataError naming
// the offending id or field.
void validate_corpus(const Corpus& corpus);

}  // namespace degender
