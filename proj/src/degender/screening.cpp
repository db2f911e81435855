#include "degender/screening.hpp"

#include <algorithm>
#include <sstream>

#include "degender/errors.hpp"
#include "degender/tokenizer.hpp"
#include "degender/util.hpp"

namespace degender {

namespace {

std::string flatten(std::string_view value) {
    std::string out(value);
    for (char& c : out) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

std::vector<std::string> merged_job_terms(const JobPosting& job) {
    std::vector<std::string> terms;
    for (const std::string& s : job.skills) {
        if (std::find(terms.begin(), terms.end(), s) == terms.end()) terms.push_back(s);
    }
    for (const std::string& k : job.keywords) {
        if (std::find(terms.begin(), terms.end(), k) == terms.end()) terms.push_back(k);
    }
    for (std::string& t : terms) t = flatten(t);
    return terms;
}

std::map<std::string, const Resume*> index_resumes(const Corpus& corpus) {
    std::map<std::string, const Resume*> out;
    for (const Resume& r : corpus.resumes) out[r.id] = &r;
    return out;
}

std::map<std::string, const JobPosting*> index_jobs(const Corpus& corpus) {
    std::map<std::string, const JobPosting*> out;
    for (const JobPosting& j : corpus.jobs) out[j.id] = &j;
    return out;
}

}  // namespace

std::string assemble_document(const Resume& resume, const JobPosting& job) {
    std::ostringstream out;
    out << flatten(job.company) << '\n';
    out << "job_loc=\n" << flatten(job.location) << '\n';
    out << "job_skills=\n" << join(merged_job_terms(job), ", ") << '\n';
    out << "employment_type=\n" << flatten(job.employment_type) << '\n';
    if (!job.source.empty()) {
        out << "source=\n" << flatten(job.source) << '\n';
    }
    out << "resume=\n" << resume.raw_text;
    return out.str();
}

AssembledSections parse_assembled_document(const std::string& document) {
    std::vector<std::string> lines = split(document, '\n');
    AssembledSections sections;
    size_t i = 0;
    auto take_value = [&](const char* key) -> std::string {
        if (i >= lines.size() || lines[i] != key) {
            throw DataError(std::string("assembled document: expected '") + key + "' line");
        }
        ++i;
        if (i >= lines.size()) {
            throw DataError(std::string("assembled document: missing value after '") + key + "'");
        }
        return lines[i++];
    };
    if (lines.empty()) throw DataError("assembled document: empty");
    sections.company = lines[i++];
    sections.job_loc = take_value("job_loc=");
    sections.job_skills = take_value("job_skills=");
    sections.employment_type = take_value("employment_type=");
    if (i < lines.size() && lines[i] == "source=") {
        sections.source = take_value("source=");
    }
    if (i >= lines.size() || lines[i] != "resume=") {
        throw DataError("assembled document: expected 'resume=' line");
    }
    ++i;
    std::ostringstream rest;
    for (size_t j = i; j < lines.size(); ++j) {
        if (j > i) rest << '\n';
        rest << lines[j];
    }
    sections.resume_text = rest.str();
    return sections;
}

std::vector<ScreeningInstance> build_instances(const Corpus& corpus,
                                               std::span<const Application> applications) {
    auto resumes = index_resumes(corpus);
    auto jobs = index_jobs(corpus);
    std::vector<ScreeningInstance> instances;
    instances.reserve(applications.size());
    for (const Application& app : applications) {
        auto r = resumes.find(app.resume_id);
        if (r == resumes.end()) {
            throw DataError("application references unknown resume id \"" + app.resume_id + "\"");
        }
        auto j = jobs.find(app.job_id);
        if (j == jobs.end()) {
            throw DataError("application references unknown job id \"" + app.job_id + "\"");
        }
        ScreeningInstance instance;
        instance.application = app;
        instance.document = assemble_document(*r->second, *j->second);
        instance.label = app.callback;
        instances.push_back(std::move(instance));
    }
    return instances;
}

ModelBundle train_screening(std::span<const ScreeningInstance> instances,
                            const TrainConfig& cfg, size_t min_df) {
    if (instances.empty()) throw UsageError("train_screening: no instances");
    bool has_pos = false, has_neg = false;
    for (const ScreeningInstance& inst : instances) (inst.label ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw DataError("train_screening: both callback outcomes must be present");
    }
    std::vector<TokenStream> docs;
    docs.reserve(instances.size());
    for (const ScreeningInstance& inst : instances) docs.push_back(tokenize(inst.document));

    ModelBundle bundle;
    bundle.feature_space = FeatureSpace::TfIdf;
    bundle.vectorizer = TfIdfVectorizer::fit(docs, min_df);
    bundle.config = cfg;

    std::vector<SparseVector> X;
    std::vector<int> y;
    X.reserve(docs.size());
    y.reserve(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
        X.push_back(bundle.vectorizer.transform(docs[i]));
        y.push_back(instances[i].label ? 1 : 0);
    }
    bundle.model = train_logistic(X, y, bundle.vectorizer.vocab_size(), cfg);
    return bundle;
}

std::vector<ApplicationScore> score_applications(
    const ModelBundle& bundle, const Corpus& corpus, std::span<const Application> applications,
    const RedactionPlan* plan, const std::map<std::string, Lexicon>* lexicons,
    const PiiRedactor* pii) {
    if (bundle.feature_space != FeatureSpace::TfIdf) {
        throw UsageError("score_applications: model is not in tf-idf feature space");
    }
    if (plan && !plan->empty() && (!lexicons || !pii)) {
        throw UsageError("score_applications: plan given without lexicons or pii context");
    }
    auto resumes = index_resumes(corpus);
    auto jobs = index_jobs(corpus);
    std::vector<ApplicationScore> out;
    out.reserve(applications.size());
    for (const Application& app : applications) {
        auto r = resumes.find(app.resume_id);
        auto j = jobs.find(app.job_id);
        if (r == resumes.end()) {
            throw DataError("application references unknown resume id \"" + app.resume_id + "\"");
        }
        if (j == jobs.end()) {
            throw DataError("application references unknown job id \"" + app.job_id + "\"");
        }
        std::string document;
        if (plan && !plan->empty()) {
            Resume redacted = apply_plan(*r->second, *plan, *lexicons, *pii);
            document = assemble_document(redacted, *j->second);
        } else {
            document = assemble_document(*r->second, *j->second);
        }
        double score = predict_proba(bundle.model, bundle.vectorizer.transform(tokenize(document)));
        out.push_back({app, score});
    }
    return out;
}

void save_scores(std::span<const ApplicationScore> scores, const std::string& path) {
    std::ostringstream out;
    out << "resume_id,job_id,score,callback\n";
    for (const ApplicationScore& s : scores) {
        out << s.application.resume_id << ',' << s.application.job_id << ','
            << format_double(s.score) << ',' << (s.application.callback ? 1 : 0) << '\n';
    }
    write_file(path, out.str());
}

}  // namespace degender
