#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "degender/classifier.hpp"
#include "degender/corpus.hpp"
#include "degender/lexicon.hpp"
#include "degender/pii.hpp"

namespace degender {

struct ScreeningInstance {
    Application application;
    std::string document;
    bool label = false;
};

// Job characteristics followed by the resume text, mirroring the ATS input
// layout: company line, then job_loc= / job_skills= / employment_type=
// (and source= when the record carries one) as key-newline-value blocks,
// with resume= last. Job skills and keywords merge into the job_skills
// block; newlines inside job fields are flattened so the layout parses
// unambiguously.
std::string assemble_document(const Resume& resume, const JobPosting& job);

// Test-side oracle counterpart lives in the suite; this parser is used by
// scoring to keep section handling in one place.
struct AssembledSections {
    std::string company;
    std::string job_loc;
    std::string job_skills;
    std::string employment_type;
    std::optional<std::string> source;
    std::string resume_text;
};
AssembledSections parse_assembled_document(const std::string& document);

std::vector<ScreeningInstance> build_instances(const Corpus& corpus,
                                               std::span<const Application> applications);

// Tf-idf over assembled documents plus elastic-net logistic on the callback
// label; both outcome classes must be present.
ModelBundle train_screening(std::span<const ScreeningInstance> instances,
                            const TrainConfig& cfg, size_t min_df = 5);

struct ApplicationScore {
    Application application;
    double score = 0.0;
};

// Applies the plan to each resume (job fields are never redacted),
// reassembles and scores with the fixed model; pass plan = nullptr to score
// the original documents.
std::vector<ApplicationScore> score_applications(
    const ModelBundle& bundle, const Corpus& corpus, std::span<const Application> applications,
    const RedactionPlan* plan, const std::map<std::string, Lexicon>* lexicons,
    const PiiRedactor* pii);

void save_scores(std::span<const ApplicationScore> scores, const std::string& path);

}  // namespace degender
