#include "degender/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "degender/errors.hpp"
#include "degender/evaluation.hpp"
#include "degender/rng.hpp"
#include "degender/util.hpp"

namespace degender {

namespace {

std::vector<std::string> make_skill_pool() {
    // mirrors data/skills.txt; the bundled file is the replaceable source,
    // this constant keeps generate_synthetic a pure function of its config
    return {
        "python", "java", "sql", "javascript", "typescript", "html", "css", "linux",
        "unix", "docker", "kubernetes", "aws", "azure", "gcp", "react", "angular",
        "vue", "nodejs", "django", "flask", "spring", "hibernate", "git", "svn",
        "jenkins", "terraform", "ansible", "puppet", "nagios", "grafana",
        "prometheus", "kafka", "rabbitmq", "redis", "memcached", "mongodb",
        "postgresql", "mysql", "sqlite", "oracle", "cassandra", "elasticsearch",
        "solr", "hadoop", "spark", "hive", "airflow", "pandas", "numpy", "scipy",
        "sklearn", "tensorflow", "pytorch", "keras", "matlab", "sas", "spss",
        "stata", "tableau", "powerbi", "excel", "powerpoint", "outlook",
        "sharepoint", "salesforce", "sap", "jira", "confluence", "trello", "slack",
        "photoshop", "illustrator", "indesign", "figma", "sketch", "autocad",
        "solidworks", "revit", "blender", "unity", "unreal", "cpp", "csharp",
        "golang", "rust", "scala", "kotlin", "swift", "php", "ruby", "perl",
        "bash", "powershell", "fortran", "cobol", "verilog", "vhdl", "arduino",
        "networking", "routing", "switching", "firewall", "vpn", "dns", "dhcp",
        "voip", "cisco", "juniper", "vmware", "virtualization", "openstack",
        "selenium", "cypress", "junit", "pytest", "mocha", "jest", "cucumber",
        "appium", "etl", "warehousing", "analytics", "nlp", "opencv", "graphql",
        "rest", "soap", "grpc", "json", "xml", "yaml", "protobuf", "microservices",
        "serverless", "lambda", "ec2", "s3", "cloudformation", "helm", "istio",
        "nginx", "apache", "tomcat", "websphere", "maven", "gradle", "npm",
        "webpack", "babel", "eslint", "redux", "nextjs", "svelte", "flutter",
        "xamarin", "ionic", "android", "ios", "objectivec", "dart", "clojure",
        "erlang", "elixir", "haskell", "groovy", "lua", "julia", "snowflake",
        "databricks", "dbt", "looker", "qlik", "segment", "mixpanel", "splunk",
        "datadog", "kibana", "logstash", "fluentd", "consul", "vault", "packer",
        "vagrant", "bitbucket", "gitlab", "circleci", "travis", "bazel", "cmake",
        "valgrind", "gdb"};
}

std::vector<std::string> make_surnames() {
    return {"smith",     "johnson",  "williams",  "brown",    "jones",    "garcia",
            "miller",    "davis",    "rodriguez", "martinez", "hernandez", "lopez",
            "gonzalez",  "wilson",   "anderson",  "taylor",   "moore",    "jackson",
            "martin",    "lee",      "perez",     "thompson", "white",    "harris",
            "sanchez",   "clark",    "ramirez",   "lewis",    "robinson", "walker",
            "young",     "allen",    "wright",    "scott",    "torres",   "nguyen",
            "hill",      "flores",   "green",     "adams",    "nelson",   "baker",
            "hall",      "rivera",   "campbell",  "mitchell", "carter",   "roberts",
            "gomez",     "phillips", "evans",     "turner",   "diaz",     "parker",
            "cruz",      "edwards",  "collins",   "reyes",    "stewart",  "morris"};
}

std::vector<std::string> make_filler_vocab() {
    return {"managed",      "developed",     "designed",      "implemented",
            "maintained",   "coordinated",   "analyzed",      "improved",
            "delivered",    "supported",     "created",       "collaborated",
            "documented",   "tested",        "deployed",      "optimized",
            "automated",    "monitored",     "migrated",      "integrated",
            "configured",   "resolved",      "investigated",  "reviewed",
            "presented",    "estimated",     "planned",       "scheduled",
            "budgeted",     "reported",      "audited",       "researched",
            "prototyped",   "launched",      "organized",     "facilitated",
            "negotiated",   "recruited",     "onboarded",     "evaluated",
            "team",         "project",       "system",        "module",
            "component",    "interface",     "dashboard",     "metric",
            "quality",      "performance",   "reliability",   "availability",
            "latency",      "throughput",    "capacity",      "scalability",
            "process",      "workflow",      "requirement",   "roadmap",
            "milestone",    "backlog",       "sprint",        "release",
            "deployment",   "rollout",       "upgrade",       "migration",
            "incident",     "outage",        "ticket",        "request",
            "documentation", "specification", "architecture",  "infrastructure",
            "database",     "server",        "cluster",       "environment",
            "staging",      "production",    "client",        "customer",
            "vendor",       "stakeholder",   "meeting",       "standup",
            "retrospective", "planning",      "review",        "audit",
            "budget",       "forecast",      "report",        "presentation",
            "initiative",   "program",       "portfolio",     "operations",
            "logistics",    "procurement",   "inventory",     "compliance",
            "governance",   "policy",        "procedure",     "standard",
            "guideline",    "training",      "workshop",      "onsite",
            "remote",       "regional",      "global",        "internal",
            "external",     "daily",         "weekly",        "quarterly"};
}

std::vector<std::string> make_competence_vocab() {
    return {"promoted",  "award",      "patent",      "published",
            "certified", "mentored",   "keynote",     "fellowship",
            "distinction", "honors",   "exceeded",    "spearheaded"};
}

std::vector<std::string> make_neutral_hobbies() {
    return {"reading",   "hiking",     "baking",      "chess",        "photography",
            "gardening", "traveling",  "cooking",     "swimming",     "cycling",
            "painting",  "volunteering", "running",   "camping",      "drawing",
            "blogging",  "table tennis", "martial arts", "board games", "puzzles"};
}

std::vector<std::string> make_male_hobbies() {
    return {"football", "golf",          "poker",        "woodworking", "fishing",
            "hunting",  "basketball",    "weightlifting", "motorcycling", "paintball"};
}

std::vector<std::string> make_female_hobbies() {
    return {"ballet",       "knitting", "scrapbooking", "sewing",         "cheerleading",
            "pilates",      "crocheting", "embroidery", "figure skating", "zumba"};
}

std::vector<std::string> make_male_gender_words() {
    return {"man", "men", "mens", "guy", "he", "him", "boy", "boys",
            "fraternity", "male", "waiter", "father", "chairman", "salesman"};
}

std::vector<std::string> make_female_gender_words() {
    return {"woman", "women", "womens", "gal", "she", "her", "girl", "girls",
            "sorority", "female", "hostess", "waitress", "mother", "chairwoman",
            "saleswoman"};
}

std::map<std::string, double> make_demo_odds() {
    return {{"forklift", 8.0},    {"varsity", 7.0},     {"quarterback", 9.0},
            {"regiment", 6.0},    {"barbershop", 7.0},  {"roadster", 8.0},
            {"woodshop", 6.0},    {"brewery", 5.0},     {"welding", 9.0},
            {"drafting", 5.0},    {"pageant", 0.125},   {"cosmetology", 0.14},
            {"bridal", 0.11},     {"soprano", 0.17},    {"boutique", 0.125},
            {"florist", 0.2},     {"skincare", 0.11},   {"mascara", 0.1},
            {"ponytail", 0.15},   {"nanny", 0.12}};
}

const std::vector<std::string> kCompanies = {
    "company a", "company b", "company c", "company d",
    "company e", "company f", "company g", "company h"};

const std::vector<std::string> kJobNames = {
    "software engineer", "data analyst",     "systems administrator",
    "product manager",   "qa engineer",      "devops engineer",
    "frontend developer", "backend developer"};

const std::vector<std::string> kBusinessUnits = {"engineering", "analytics", "platform",
                                                 "services"};

const std::vector<std::string> kEmploymentTypes = {"fulltime", "parttime", "contract"};

const std::vector<std::string> kLocations = {
    "new york, ny",     "san francisco, ca", "austin, tx", "seattle, wa",
    "boston, ma",       "chicago, il",       "denver, co", "atlanta, ga"};

const std::vector<std::string> kSources = {"jobsite", "referral", "agency", ""};

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string pick(Rng& rng, const std::vector<std::string>& pool) {
    return pool[rng.uniform_index(pool.size())];
}

}  // namespace

const std::vector<std::string>& builtin_skill_pool() {
    static const std::vector<std::string> pool = make_skill_pool();
    return pool;
}
const std::vector<std::string>& builtin_surnames() {
    static const std::vector<std::string> pool = make_surnames();
    return pool;
}
const std::vector<std::string>& builtin_filler_vocab() {
    static const std::vector<std::string> pool = make_filler_vocab();
    return pool;
}
const std::vector<std::string>& builtin_competence_vocab() {
    static const std::vector<std::string> pool = make_competence_vocab();
    return pool;
}
const std::vector<std::string>& neutral_hobby_pool() {
    static const std::vector<std::string> pool = make_neutral_hobbies();
    return pool;
}
const std::vector<std::string>& male_hobby_pool() {
    static const std::vector<std::string> pool = make_male_hobbies();
    return pool;
}
const std::vector<std::string>& female_hobby_pool() {
    static const std::vector<std::string> pool = make_female_hobbies();
    return pool;
}
const std::vector<std::string>& male_gender_word_pool() {
    static const std::vector<std::string> pool = make_male_gender_words();
    return pool;
}
const std::vector<std::string>& female_gender_word_pool() {
    static const std::vector<std::string> pool = make_female_gender_words();
    return pool;
}
const std::map<std::string, double>& demo_token_odds() {
    static const std::map<std::string, double> odds = make_demo_odds();
    return odds;
}

void validate(const SynthConfig& config) {
    if (config.n_resumes == 0) throw UsageError("n_resumes must be positive");
    for (const auto& [token, odds] : config.gendered_token_odds) {
        if (!(odds > 0.0)) {
            throw UsageError("gendered token odds must be strictly positive (token \"" + token +
                             "\")");
        }
    }
    auto check_prob = [](double v, const char* name) {
        if (v < 0.0 || v > 1.0) {
            throw UsageError(std::string(name) + " must be in [0, 1]");
        }
    };
    check_prob(config.hobby_gender_skew, "hobby_gender_skew");
    check_prob(config.gender_word_rate, "gender_word_rate");
    check_prob(config.marker_base_rate, "marker_base_rate");
    check_prob(config.contact_rate, "contact_rate");
    if (config.marker_base_rate <= 0.0 || config.marker_base_rate >= 1.0) {
        throw UsageError("marker_base_rate must be in (0, 1)");
    }
    if (config.callback_bias < -1.0 || config.callback_bias > 1.0) {
        throw UsageError("callback_bias must be in [-1, 1]");
    }
    if (config.callback_base_rate <= 0.0 || config.callback_base_rate >= 1.0) {
        throw UsageError("callback_base_rate must be in (0, 1)");
    }
    if (config.skill_vocab_size == 0) throw UsageError("skill_vocab_size must be positive");
    if (config.male_names.empty() || config.female_names.empty()) {
        throw UsageError("both planted name lists must be non-empty");
    }
}

CarryProbs marker_carry_probs(double odds_ratio, double base_rate) {
    if (std::isinf(odds_ratio)) return {1.0, 0.0};
    double base_odds = base_rate / (1.0 - base_rate);
    if (odds_ratio >= 1.0) {
        double male_odds = odds_ratio * base_odds;
        return {male_odds / (1.0 + male_odds), base_rate};
    }
    double female_odds = base_odds / odds_ratio;
    return {base_rate, female_odds / (1.0 + female_odds)};
}

Corpus generate_synthetic(const SynthConfig& config) {
    validate(config);
    Rng rng(config.seed);

    const std::vector<std::string>& base_pool =
        config.skill_pool.empty() ? builtin_skill_pool() : config.skill_pool;
    std::vector<std::string> skills(base_pool.begin(),
                                    base_pool.begin() +
                                        static_cast<ptrdiff_t>(std::min(config.skill_vocab_size,
                                                                        base_pool.size())));
    for (size_t i = skills.size(); i < config.skill_vocab_size; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "skill_%03zu", i);
        skills.emplace_back(buf);
    }
    const size_t n_tracks = std::min<size_t>(5, skills.size());
    auto track_of_skill = [&](size_t skill_index) { return skill_index % n_tracks; };

    const size_t n_jobs =
        config.n_jobs > 0 ? config.n_jobs : std::max<size_t>(1, config.n_resumes / 200);

    Corpus corpus;
    corpus.jobs.reserve(n_jobs);
    for (size_t j = 0; j < n_jobs; ++j) {
        JobPosting job;
        char id[32];
        std::snprintf(id, sizeof(id), "J%04zu", j + 1);
        job.id = id;
        job.company = kCompanies[j % kCompanies.size()];
        job.job_name = pick(rng, kJobNames);
        job.business_unit = pick(rng, kBusinessUnits);
        job.employment_type = pick(rng, kEmploymentTypes);
        job.location = pick(rng, kLocations);
        job.source = kSources[rng.uniform_index(kSources.size())];
        size_t job_track = j % n_tracks;
        for (size_t s = 0; s < 6; ++s) {
            size_t idx = rng.uniform_index(skills.size());
            if (track_of_skill(idx) != job_track) {
                idx = (idx / n_tracks) * n_tracks + job_track;
                if (idx >= skills.size()) idx = job_track % skills.size();
            }
            job.skills.push_back(skills[idx]);
        }
        std::sort(job.skills.begin(), job.skills.end());
        job.skills.erase(std::unique(job.skills.begin(), job.skills.end()), job.skills.end());
        for (size_t s = 0; s < 3; ++s) {
            job.keywords.push_back(skills[rng.uniform_index(skills.size())]);
        }
        std::sort(job.keywords.begin(), job.keywords.end());
        job.keywords.erase(std::unique(job.keywords.begin(), job.keywords.end()),
                           job.keywords.end());
        corpus.jobs.push_back(std::move(job));
    }

    // balanced to within one resume
    std::vector<Gender> genders(config.n_resumes);
    for (size_t i = 0; i < config.n_resumes; ++i) {
        genders[i] = (i < (config.n_resumes + 1) / 2) ? Gender::Male : Gender::Female;
    }
    rng.shuffle(genders);

    std::vector<std::string> combined_names = config.male_names;
    combined_names.insert(combined_names.end(), config.female_names.begin(),
                          config.female_names.end());

    const double callback_intercept = logit(config.callback_base_rate);
    const std::vector<std::string>& filler = builtin_filler_vocab();
    const std::vector<std::string>& competence = builtin_competence_vocab();

    corpus.resumes.reserve(config.n_resumes);
    corpus.applications.reserve(config.n_resumes);
    for (size_t i = 0; i < config.n_resumes; ++i) {
        Resume r;
        char id[32];
        std::snprintf(id, sizeof(id), "R%06zu", i + 1);
        r.id = id;
        r.gender = genders[i];
        const bool male = r.gender == Gender::Male;

        std::string first;
        if (config.gendered_names) {
            first = pick(rng, male ? config.male_names : config.female_names);
        } else {
            first = pick(rng, combined_names);
        }
        std::string last = pick(rng, builtin_surnames());
        r.applicant_name = first + " " + last;

        r.years_experience = static_cast<uint32_t>(rng.uniform_index(21));
        r.degree = static_cast<Degree>(rng.uniform_index(4));
        r.field_of_study = static_cast<FieldOfStudy>(rng.uniform_index(5));

        const double latent = rng.normal();
        const size_t track = rng.uniform_index(n_tracks);

        std::vector<std::string> resume_skills;
        const size_t n_skills = 6 + rng.uniform_index(4);
        for (size_t s = 0; s < n_skills; ++s) {
            size_t idx = rng.uniform_index(skills.size());
            if (!rng.bernoulli(0.2) && track_of_skill(idx) != track) {
                idx = (idx / n_tracks) * n_tracks + track;
                if (idx >= skills.size()) idx = track % skills.size();
            }
            resume_skills.push_back(skills[idx]);
        }
        std::sort(resume_skills.begin(), resume_skills.end());
        resume_skills.erase(std::unique(resume_skills.begin(), resume_skills.end()),
                            resume_skills.end());

        std::vector<std::string> hobbies;
        for (size_t h = 0; h < 2; ++h) {
            if (rng.bernoulli(config.hobby_gender_skew)) {
                hobbies.push_back(pick(rng, male ? male_hobby_pool() : female_hobby_pool()));
            } else {
                hobbies.push_back(pick(rng, neutral_hobby_pool()));
            }
        }

        std::vector<std::string> extras;
        for (size_t c = 0; c < competence.size(); ++c) {
            double threshold =
                -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(competence.size() - 1);
            if (rng.bernoulli(sigmoid(1.5 * latent - threshold))) {
                extras.push_back(competence[c]);
            }
        }
        if (rng.bernoulli(config.gender_word_rate)) {
            extras.push_back(pick(rng, male ? male_gender_word_pool()
                                            : female_gender_word_pool()));
        }
        for (const auto& [token, odds] : config.gendered_token_odds) {
            CarryProbs probs = marker_carry_probs(odds, config.marker_base_rate);
            if (rng.bernoulli(male ? probs.male : probs.female)) {
                extras.push_back(token);
            }
        }

        std::ostringstream text;
        text << first << ' ' << last << '\n';
        const bool with_email = rng.bernoulli(config.contact_rate);
        const bool with_linkedin = rng.bernoulli(config.contact_rate * 0.5);
        const bool with_site = rng.bernoulli(config.contact_rate * 0.2);
        if (with_email) text << first << '.' << last << "@example.com\n";
        if (with_linkedin) {
            text << "linkedin.com/in/" << first << last << rng.uniform_index(90) + 10 << '\n';
        }
        if (with_site) text << "www." << first << last << ".dev\n";
        text << "education\n" << to_string(r.degree) << ' ' << to_string(r.field_of_study)
             << '\n';
        text << "experience\n" << r.years_experience << " years experience\n";
        for (size_t f = 0; f < 24; ++f) {
            text << pick(rng, filler) << ((f + 1) % 12 == 0 ? '\n' : ' ');
        }
        if (!extras.empty()) {
            for (size_t e = 0; e < extras.size(); ++e) {
                text << extras[e] << (e + 1 == extras.size() ? '\n' : ' ');
            }
        }
        text << "skills\n" << join(resume_skills, ", ") << '\n';
        text << "hobbies\n" << join(hobbies, ", ") << '\n';
        r.raw_text = text.str();

        Application app;
        app.resume_id = r.id;
        app.job_id = corpus.jobs[rng.uniform_index(n_jobs)].id;
        double callback_logit = callback_intercept + config.callback_skill_gain * latent +
                                (male ? config.callback_bias : 0.0);
        app.callback = rng.bernoulli(sigmoid(callback_logit));

        corpus.resumes.push_back(std::move(r));
        corpus.applications.push_back(std::move(app));
    }

    validate_corpus(corpus);
    return corpus;
}

double oracle_gender_auroc(const SynthConfig& config, size_t n_mc) {
    // only the marker parameters matter here; the corpus-shape fields are
    // generate-time preconditions
    for (const auto& [token, odds] : config.gendered_token_odds) {
        if (!(odds > 0.0)) {
            throw UsageError("gendered token odds must be strictly positive (token \"" + token +
                             "\")");
        }
    }
    if (config.marker_base_rate <= 0.0 || config.marker_base_rate >= 1.0) {
        throw UsageError("marker_base_rate must be in (0, 1)");
    }
    if (n_mc < 10000) throw UsageError("oracle_gender_auroc: n_mc must be at least 10000");

    struct TokenModel {
        double p_male, p_female, llr_present, llr_absent;
    };
    std::vector<TokenModel> tokens;
    tokens.reserve(config.gendered_token_odds.size());
    const double eps = 1e-12;
    for (const auto& [token, odds] : config.gendered_token_odds) {
        CarryProbs probs = marker_carry_probs(odds, config.marker_base_rate);
        double pm = std::clamp(probs.male, eps, 1.0 - eps);
        double pf = std::clamp(probs.female, eps, 1.0 - eps);
        tokens.push_back({probs.male, probs.female, std::log(pm / pf),
                          std::log((1.0 - pm) / (1.0 - pf))});
    }

    Rng rng(derive_seed(config.seed, "oracle"));
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(2 * n_mc);
    labels.reserve(2 * n_mc);
    for (int male = 1; male >= 0; --male) {
        for (size_t i = 0; i < n_mc; ++i) {
            double score = 0.0;
            for (const TokenModel& t : tokens) {
                bool carries = rng.bernoulli(male ? t.p_male : t.p_female);
                score += carries ? t.llr_present : t.llr_absent;
            }
            scores.push_back(score);
            labels.push_back(male);
        }
    }
    return auroc(scores, labels);
}

}  // namespace degender
