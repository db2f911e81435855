#include "degender/params.hpp"

#include <cstdlib>

#include "degender/errors.hpp"
#include "degender/util.hpp"

namespace degender {

const std::map<std::string, Params::KeyInfo>& Params::registry() {
    static const std::map<std::string, KeyInfo> keys = {
        {"seed", {"42", "master seed; per-stage seeds derive from it"}},
        {"jobs", {"1", "worker threads for per-document stages"}},
        {"data_dir", {"", "lexicon directory (default: env DEGENDER_DATA_DIR or bundled)"}},
        {"format", {"csv", "report format: csv, or jsonl for csv plus jsonl"}},
        {"plan", {"pii,gender_words,hobbies", "redaction passes, applied in order"}},
        // synthetic generator
        {"n_resumes", {"0", "number of resumes to generate"}},
        {"n_jobs", {"0", "job postings to generate (0: one per ~200 resumes)"}},
        {"odds", {"default", "marker odds list tok=r,... ; 'default' demo set, 'none' empty"}},
        {"hobby_gender_skew", {"0", "probability a hobby draw is gender-stereotyped"}},
        {"gender_word_rate", {"0", "probability a resume carries a gender-indicating word"}},
        {"callback_bias", {"0", "additive male effect on callback log-odds"}},
        {"callback_base_rate", {"0.15", "baseline callback probability"}},
        {"callback_skill_gain", {"2", "latent skill weight on callback log-odds"}},
        {"marker_base_rate", {"0.1", "marker carry probability for the disfavored gender"}},
        {"contact_rate", {"0.6", "probability of a planted email line"}},
        {"gendered_names", {"true", "draw first names from gender-matched lists"}},
        {"skill_vocab_size", {"100", "distinct skill tokens available to the generator"}},
        {"male_names", {"", "male first-name list path (default: bundled)"}},
        {"female_names", {"", "female first-name list path (default: bundled)"}},
        // embeddings
        {"dim", {"100", "embedding dimension"}},
        {"window", {"5", "skip-gram window"}},
        {"negatives", {"5", "negative samples per context"}},
        {"epochs", {"5", "skip-gram epochs"}},
        {"min_count", {"5", "minimum token count for the embedding vocabulary"}},
        {"subsample", {"1e-3", "frequent-token subsampling threshold (0 disables)"}},
        {"vectors", {"", "pre-trained vector file to load instead of training"}},
        {"skills", {"", "skills lexicon path (default: bundled skills.txt)"}},
        {"definitional_pairs", {"", "definitional pair file (default: bundled)"}},
        {"debias_compare", {"true", "also train the debiased-embedding classifier"}},
        // matching
        {"max_experience_gap", {"2", "maximum experience gap in years"}},
        {"min_cosine", {"0.7", "minimum resume-vector cosine similarity"}},
        {"same_degree", {"true", "require equal degree"}},
        {"same_field", {"true", "require equal field of study"}},
        // classifier training
        {"alpha_grid", {"1e-4,1e-3,1e-2,1e-1", "elastic-net strengths tried on the eval slice"}},
        {"lambda", {"0.5", "elastic-net mixing (1 = L1 only)"}},
        {"max_iters", {"300", "proximal-gradient iteration cap"}},
        {"tolerance", {"1e-7", "relative objective-decrease stopping threshold"}},
        {"min_df", {"5", "minimum document frequency for tf-idf vocabulary"}},
        // attribution + ladder
        {"attr_mode", {"linear", "attribution mode: linear or masking"}},
        {"attr_samples", {"32", "permutations per document in masking mode"}},
        {"grid", {"1%,2%,5%,10%,20%,40%,60%,80%", "ablation ks (counts or % of ranking)"}},
        {"retrain", {"false", "retrain models per ladder step instead of fixed models"}},
    };
    return keys;
}

namespace {

bool is_lexicon_binding(const std::string& key) { return key.rfind("lexicon.", 0) == 0; }

const Params::KeyInfo& info_for(const std::string& key) {
    auto it = Params::registry().find(key);
    if (it == Params::registry().end()) {
        throw UsageError("unknown parameter \"" + key + "\"");
    }
    return it->second;
}

}  // namespace

void Params::set(const std::string& key, const std::string& value) {
    if (!is_lexicon_binding(key)) info_for(key);
    values_[key] = value;
}

std::string Params::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    if (is_lexicon_binding(key)) return "";
    return info_for(key).default_value;
}

uint64_t Params::get_u64(const std::string& key) const {
    std::string v = get(key);
    try {
        size_t consumed = 0;
        uint64_t out = std::stoull(v, &consumed);
        if (consumed != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw UsageError("parameter \"" + key + "\" must be a non-negative integer, got \"" + v +
                         "\"");
    }
}

size_t Params::get_size(const std::string& key) const {
    return static_cast<size_t>(get_u64(key));
}

int Params::get_int(const std::string& key) const {
    std::string v = get(key);
    try {
        size_t consumed = 0;
        int out = std::stoi(v, &consumed);
        if (consumed != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw UsageError("parameter \"" + key + "\" must be an integer, got \"" + v + "\"");
    }
}

double Params::get_double(const std::string& key) const {
    std::string v = get(key);
    try {
        size_t consumed = 0;
        double out = std::stod(v, &consumed);
        if (consumed != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw UsageError("parameter \"" + key + "\" must be a number, got \"" + v + "\"");
    }
}

bool Params::get_bool(const std::string& key) const {
    std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError("parameter \"" + key + "\" must be a boolean, got \"" + v + "\"");
}

std::map<std::string, std::string> Params::effective() const {
    std::map<std::string, std::string> out;
    for (const auto& [key, info] : registry()) out[key] = get(key);
    for (const auto& [key, value] : values_) out[key] = value;
    return out;
}

Params Params::from_file(const std::string& path) {
    Params params;
    size_t line_no = 0;
    for (const std::string& raw : split(read_file(path), '\n')) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("config file " + path + " line " + std::to_string(line_no) +
                            ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            params.set(key, value);
        } catch (const UsageError& e) {
            throw DataError("config file " + path + " line " + std::to_string(line_no) + ": " +
                            e.what());
        }
    }
    return params;
}

void Params::merge(const Params& overrides) {
    for (const auto& [key, value] : overrides.values_) values_[key] = value;
}

}  // namespace degender
