#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "degender/corpus.hpp"

namespace degender {

// Generator knobs. Every gendered signal is planted explicitly so downstream
// claims are verifiable: odds-ratio marker tokens, gender-matched names,
// stereotyped hobbies, and gender-indicating words each feed exactly one
// redaction pass; callbacks depend on a latent skill score (encoded by
// competence tokens) plus an optional additive gender bias.
struct SynthConfig {
    size_t n_resumes = 0;
    uint64_t seed = 42;

    // token -> odds ratio; >1 male-leaning, <1 female-leaning, +inf means
    // present iff male. Carry probabilities derive from marker_base_rate.
    std::map<std::string, double> gendered_token_odds;

    std::vector<std::string> male_names;
    std::vector<std::string> female_names;
    bool gendered_names = true;  // false: first names drawn from the combined pool

    double hobby_gender_skew = 0.0;  // probability a hobby draw is stereotyped
    double gender_word_rate = 0.0;   // probability of one gender-indicating word

    double callback_bias = 0.0;       // additive male effect on callback log-odds
    double callback_base_rate = 0.15;
    double callback_skill_gain = 2.0;

    double marker_base_rate = 0.10;  // carry probability for the disfavored gender
    double contact_rate = 0.6;       // probability of a planted email line

    size_t skill_vocab_size = 100;
    size_t n_jobs = 0;  // 0: one job per ~200 resumes

    std::vector<std::string> skill_pool;  // empty: built-in curated pool
};

void validate(const SynthConfig& config);

Corpus generate_synthetic(const SynthConfig& config);

// Per-gender carry probabilities for a planted token: the disfavored gender
// carries at base_rate and the favored gender's odds are scaled by the ratio.
struct CarryProbs {
    double male = 0.0;
    double female = 0.0;
};
CarryProbs marker_carry_probs(double odds_ratio, double base_rate);

// Monte-Carlo AUROC of the Bayes-optimal classifier that observes only the
// planted gendered tokens; the ceiling any learned classifier is compared
// against. Requires n_mc >= 10000.
double oracle_gender_auroc(const SynthConfig& config, size_t n_mc);

// Built-in pools, exposed so tests can reason about which tokens carry
// which signal.
const std::vector<std::string>& builtin_skill_pool();
const std::vector<std::string>& builtin_surnames();
const std::vector<std::string>& builtin_filler_vocab();
const std::vector<std::string>& builtin_competence_vocab();
const std::vector<std::string>& neutral_hobby_pool();
const std::vector<std::string>& male_hobby_pool();
const std::vector<std::string>& female_hobby_pool();
const std::vector<std::string>& male_gender_word_pool();
const std::vector<std::string>& female_gender_word_pool();
const std::map<std::string, double>& demo_token_odds();

}  // namespace degender
