#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "degender/corpus.hpp"
#include "degender/embedding.hpp"

namespace degender {

struct MatchConfig {
    uint32_t max_experience_gap = 2;
    double min_cosine = 0.7;
    bool require_same_degree = true;
    bool require_same_field = true;
};

struct MatchedPair {
    std::string male_id;
    std::string female_id;
    double similarity = 0.0;
};

// Greedy 1-1 matching without replacement: males in ascending id order, each
// takes the highest-similarity eligible female (ties broken by smallest
// female id); unmatched males are dropped. Resumes with flagged (zero)
// vectors are never eligible.
std::vector<MatchedPair> match_resumes(std::span<const Resume> males,
                                       std::span<const Resume> females,
                                       const std::map<std::string, ResumeVector>& vectors,
                                       const MatchConfig& cfg);

void save_pairs(std::span<const MatchedPair> pairs, const std::string& path);
std::vector<MatchedPair> load_pairs(const std::string& path);

}  // namespace degender
