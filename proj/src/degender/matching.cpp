#include "degender/matching.hpp"

#include <algorithm>
#include <sstream>

#include "degender/errors.hpp"
#include "degender/util.hpp"

namespace degender {

std::vector<MatchedPair> match_resumes(std::span<const Resume> males,
                                       std::span<const Resume> females,
                                       const std::map<std::string, ResumeVector>& vectors,
                                       const MatchConfig& cfg) {
    if (cfg.min_cosine < -1.0 || cfg.min_cosine > 1.0) {
        throw UsageError("match: min_cosine must be in [-1, 1]");
    }
    auto vector_for = [&](const Resume& r) -> const ResumeVector& {
        auto it = vectors.find(r.id);
        if (it == vectors.end()) {
            throw DataError("match: no resume vector for id \"" + r.id + "\"");
        }
        return it->second;
    };

    std::vector<size_t> male_order(males.size());
    for (size_t i = 0; i < males.size(); ++i) male_order[i] = i;
    std::sort(male_order.begin(), male_order.end(),
              [&](size_t a, size_t b) { return males[a].id < males[b].id; });

    // bucket candidates by the hard constraints so each male scans few
    std::map<std::pair<int, int>, std::vector<size_t>> buckets;
    auto bucket_key = [&](const Resume& r) {
        return std::pair<int, int>{
            cfg.require_same_degree ? static_cast<int>(r.degree) : 0,
            cfg.require_same_field ? static_cast<int>(r.field_of_study) : 0};
    };
    for (size_t i = 0; i < females.size(); ++i) {
        buckets[bucket_key(females[i])].push_back(i);
    }

    std::vector<bool> taken(females.size(), false);
    std::vector<MatchedPair> pairs;
    for (size_t mi : male_order) {
        const Resume& male = males[mi];
        const ResumeVector& male_vec = vector_for(male);
        if (male_vec.flagged()) continue;
        auto it = buckets.find(bucket_key(male));
        if (it == buckets.end()) continue;
        bool found = false;
        double best_sim = 0.0;
        size_t best_fi = 0;
        for (size_t fi : it->second) {
            if (taken[fi]) continue;
            const Resume& female = females[fi];
            uint32_t gap = male.years_experience > female.years_experience
                               ? male.years_experience - female.years_experience
                               : female.years_experience - male.years_experience;
            if (gap > cfg.max_experience_gap) continue;
            const ResumeVector& female_vec = vector_for(female);
            if (female_vec.flagged()) continue;
            double sim = cosine(male_vec.vector, female_vec.vector);
            if (sim < cfg.min_cosine) continue;
            if (!found || sim > best_sim ||
                (sim == best_sim && female.id < females[best_fi].id)) {
                found = true;
                best_sim = sim;
                best_fi = fi;
            }
        }
        if (found) {
            taken[best_fi] = true;
            pairs.push_back({male.id, females[best_fi].id, best_sim});
        }
    }
    return pairs;
}

void save_pairs(std::span<const MatchedPair> pairs, const std::string& path) {
    std::ostringstream out;
    out << "male_id,female_id,similarity\n";
    for (const MatchedPair& p : pairs) {
        out << p.male_id << ',' << p.female_id << ',' << format_double(p.similarity) << '\n';
    }
    write_file(path, out.str());
}

std::vector<MatchedPair> load_pairs(const std::string& path) {
    std::string text = read_file(path);
    std::vector<std::string> lines = split(text, '\n');
    if (lines.empty() || trim(lines[0]) != "male_id,female_id,similarity") {
        throw DataError("pairs file missing header: " + path);
    }
    std::vector<MatchedPair> pairs;
    for (size_t i = 1; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty()) continue;
        std::vector<std::string> cols = split(line, ',');
        if (cols.size() != 3) {
            throw DataError("pairs file line " + std::to_string(i + 1) + ": expected 3 columns");
        }
        pairs.push_back({cols[0], cols[1], std::stod(cols[2])});
    }
    return pairs;
}

}  // namespace degender
