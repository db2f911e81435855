#include "degender/corpus.hpp"

#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "degender/errors.hpp"
#include "degender/util.hpp"

namespace degender {

using nlohmann::json;

std::string to_string(Gender g) { return g == Gender::Male ? "male" : "female"; }

std::string to_string(Degree d) {
    switch (d) {
        case Degree::Associate: return "associate";
        case Degree::Bachelors: return "bachelors";
        case Degree::Masters: return "masters";
        case Degree::Doctorate: return "doctorate";
    }
    return "bachelors";
}

std::string to_string(FieldOfStudy f) {
    switch (f) {
        case FieldOfStudy::Technical: return "technical";
        case FieldOfStudy::Science: return "science";
        case FieldOfStudy::Business: return "business";
        case FieldOfStudy::Law: return "law";
        case FieldOfStudy::Other: return "other";
    }
    return "other";
}

Gender gender_from_string(const std::string& s) {
    if (s == "male") return Gender::Male;
    if (s == "female") return Gender::Female;
    throw DataError("invalid gender value: \"" + s + "\"");
}

Degree degree_from_string(const std::string& s) {
    if (s == "associate") return Degree::Associate;
    if (s == "bachelors") return Degree::Bachelors;
    if (s == "masters") return Degree::Masters;
    if (s == "doctorate") return Degree::Doctorate;
    throw DataError("invalid degree value: \"" + s + "\"");
}

FieldOfStudy field_from_string(const std::string& s) {
    if (s == "technical") return FieldOfStudy::Technical;
    if (s == "science") return FieldOfStudy::Science;
    if (s == "business") return FieldOfStudy::Business;
    if (s == "law") return FieldOfStudy::Law;
    if (s == "other") return FieldOfStudy::Other;
    throw DataError("invalid field_of_study value: \"" + s + "\"");
}

namespace {

[[noreturn]] void line_error(size_t line_no, const std::string& what) {
    throw DataError("line " + std::to_string(line_no) + ": " + what);
}

const json& require_field(const json& obj, const char* field, size_t line_no) {
    auto it = obj.find(field);
    if (it == obj.end()) {
        line_error(line_no, std::string("missing field '") + field + "'");
    }
    return *it;
}

std::string require_string(const json& obj, const char* field, size_t line_no) {
    const json& v = require_field(obj, field, line_no);
    if (!v.is_string()) {
        line_error(line_no, std::string("field '") + field + "' must be a string");
    }
    return v.get<std::string>();
}

std::vector<std::string> require_string_list(const json& obj, const char* field,
                                             size_t line_no) {
    const json& v = require_field(obj, field, line_no);
    if (!v.is_array()) {
        line_error(line_no, std::string("field '") + field + "' must be a list");
    }
    std::vector<std::string> out;
    for (const json& item : v) {
        if (!item.is_string()) {
            line_error(line_no, std::string("field '") + field + "' must hold strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

json resume_to_json(const Resume& r) {
    return json{{"kind", "resume"},
                {"id", r.id},
                {"applicant_name", r.applicant_name},
                {"gender", to_string(r.gender)},
                {"years_experience", r.years_experience},
                {"degree", to_string(r.degree)},
                {"field_of_study", to_string(r.field_of_study)},
                {"raw_text", r.raw_text}};
}

json job_to_json(const JobPosting& j) {
    json out{{"kind", "job"},
             {"id", j.id},
             {"company", j.company},
             {"job_name", j.job_name},
             {"business_unit", j.business_unit},
             {"employment_type", j.employment_type},
             {"location", j.location},
             {"skills", j.skills},
             {"keywords", j.keywords}};
    if (!j.source.empty()) out["source"] = j.source;
    return out;
}

json application_to_json(const Application& a) {
    return json{{"kind", "application"},
                {"resume_id", a.resume_id},
                {"job_id", a.job_id},
                {"callback", a.callback}};
}

}  // namespace

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::ostringstream out;
    for (const Resume& r : corpus.resumes) out << resume_to_json(r).dump() << '\n';
    for (const JobPosting& j : corpus.jobs) out << job_to_json(j).dump() << '\n';
    for (const Application& a : corpus.applications) {
        out << application_to_json(a).dump() << '\n';
    }
    return out.str();
}

Corpus corpus_from_jsonl(std::string_view text) {
    Corpus corpus;
    size_t line_no = 0;
    for (const std::string& raw : split(text, '\n')) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) line_error(line_no, "record is not an object");
        std::string kind = require_string(obj, "kind", line_no);
        try {
            if (kind == "resume") {
                Resume r;
                r.id = require_string(obj, "id", line_no);
                r.applicant_name = require_string(obj, "applicant_name", line_no);
                r.gender = gender_from_string(require_string(obj, "gender", line_no));
                const json& years = require_field(obj, "years_experience", line_no);
                if (!years.is_number_unsigned()) {
                    line_error(line_no, "field 'years_experience' must be a non-negative integer");
                }
                r.years_experience = years.get<uint32_t>();
                r.degree = degree_from_string(require_string(obj, "degree", line_no));
                r.field_of_study =
                    field_from_string(require_string(obj, "field_of_study", line_no));
                r.raw_text = require_string(obj, "raw_text", line_no);
                if (r.raw_text.empty()) line_error(line_no, "field 'raw_text' is empty");
                corpus.resumes.push_back(std::move(r));
            } else if (kind == "job") {
                JobPosting j;
                j.id = require_string(obj, "id", line_no);
                j.company = require_string(obj, "company", line_no);
                j.job_name = require_string(obj, "job_name", line_no);
                j.business_unit = require_string(obj, "business_unit", line_no);
                j.employment_type = require_string(obj, "employment_type", line_no);
                j.location = require_string(obj, "location", line_no);
                j.skills = require_string_list(obj, "skills", line_no);
                j.keywords = require_string_list(obj, "keywords", line_no);
                if (obj.contains("source")) j.source = require_string(obj, "source", line_no);
                corpus.jobs.push_back(std::move(j));
            } else if (kind == "application") {
                Application a;
                a.resume_id = require_string(obj, "resume_id", line_no);
                a.job_id = require_string(obj, "job_id", line_no);
                const json& cb = require_field(obj, "callback", line_no);
                if (!cb.is_boolean()) {
                    line_error(line_no, "field 'callback' must be a boolean");
                }
                a.callback = cb.get<bool>();
                corpus.applications.push_back(std::move(a));
            } else {
                line_error(line_no, "unknown record kind \"" + kind + "\"");
            }
        } catch (const DataError&) {
            throw;
        } catch (const std::exception& e) {
            line_error(line_no, e.what());
        }
    }
    validate_corpus(corpus);
    return corpus;
}

Corpus load_corpus(const std::string& path) {
    return corpus_from_jsonl(read_file(path));
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    write_file(path, corpus_to_jsonl(corpus));
}

void validate_corpus(const Corpus& corpus) {
    std::set<std::string> resume_ids;
    for (const Resume& r : corpus.resumes) {
        if (!resume_ids.insert(r.id).second) {
            throw DataError("duplicate resume id \"" + r.id + "\"");
        }
        if (r.raw_text.empty()) {
            throw DataError("resume \"" + r.id + "\" has empty raw_text");
        }
        if (r.years_experience > 80) {
            throw DataError("resume \"" + r.id + "\" has years_experience > 80");
        }
        if (r.applicant_name.empty()) {
            throw DataError("resume \"" + r.id + "\" has empty applicant_name");
        }
    }
    std::set<std::string> job_ids;
    for (const JobPosting& j : corpus.jobs) {
        if (!job_ids.insert(j.id).second) {
            throw DataError("duplicate job id \"" + j.id + "\"");
        }
    }
    std::set<std::pair<std::string, std::string>> seen_apps;
    for (const Application& a : corpus.applications) {
        if (!resume_ids.count(a.resume_id)) {
            throw DataError("application references unknown resume id \"" + a.resume_id + "\"");
        }
        if (!job_ids.count(a.job_id)) {
            throw DataError("application references unknown job id \"" + a.job_id + "\"");
        }
        if (!seen_apps.insert({a.resume_id, a.job_id}).second) {
            throw DataError("duplicate application (" + a.resume_id + ", " + a.job_id + ")");
        }
    }
}

}  // namespace degender
