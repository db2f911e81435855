#include "doctest.h"

#include <set>

#include "degender/errors.hpp"
#include "degender/lexicon.hpp"
#include "degender/pii.hpp"
#include "degender/rng.hpp"
#include "degender/util.hpp"

using namespace degender;

namespace {

const char* kDataDir = DEGENDER_TEST_DATA_DIR;

Lexicon lex(const std::vector<std::string>& entries) {
    return Lexicon::from_entries("test", entries);
}

// independent oracle: naive longest-match scanner over the token list
std::vector<std::string> naive_phrase_redact(const std::vector<std::string>& tokens,
                                             const std::set<std::vector<std::string>>& phrases) {
    size_t max_len = 0;
    for (const auto& p : phrases) max_len = std::max(max_len, p.size());
    std::vector<std::string> out;
    size_t i = 0;
    while (i < tokens.size()) {
        size_t best = 0;
        for (size_t len = std::min(max_len, tokens.size() - i); len >= 1; --len) {
            std::vector<std::string> window(tokens.begin() + i, tokens.begin() + i + len);
            bool has_marker = false;
            for (const auto& t : window) has_marker |= (t == "[DEL]");
            if (!has_marker && phrases.count(window)) {
                best = len;
                break;
            }
        }
        if (best > 0) {
            out.push_back("[DEL]");
            i += best;
        } else {
            out.push_back(tokens[i]);
            ++i;
        }
    }
    return out;
}

TokenStream stream_of(const std::vector<std::string>& tokens) {
    TokenStream s;
    size_t cursor = 0;
    for (const std::string& t : tokens) {
        s.tokens.push_back(t);
        s.spans.push_back({cursor, cursor + t.size()});
        cursor += t.size() + 1;
    }
    return s;
}

}  // namespace

TEST_CASE("redact_lexicon: single-token hits from the bundled gender word list") {
    Lexicon gender_words =
        Lexicon::load("gender_words", std::string(kDataDir) + "/gender_words.txt");
    CHECK(gender_words.size() == 29);
    TokenStream in = tokenize("head waitress at cafe");
    TokenStream out = redact_lexicon(in, gender_words);
    CHECK(out.tokens == std::vector<std::string>{"head", "[DEL]", "at", "cafe"});
}

TEST_CASE("redact_lexicon: no hits leaves the stream unchanged") {
    TokenStream in = tokenize("plain tokens only");
    TokenStream out = redact_lexicon(in, lex({"absent"}));
    CHECK(out.tokens == in.tokens);
    CHECK(out.spans == in.spans);
}

TEST_CASE("redact_lexicon: phrases collapse to one marker") {
    TokenStream in = tokenize("table tennis club");
    TokenStream out = redact_lexicon(in, lex({"table tennis"}));
    CHECK(out.tokens == std::vector<std::string>{"[DEL]", "club"});
    // the marker span covers the full phrase
    CHECK(out.spans[0].begin == 0);
    CHECK(out.spans[0].end == std::string("table tennis").size());
}

TEST_CASE("redact_lexicon: longest match wins") {
    Lexicon both = lex({"ice", "ice skating"});
    TokenStream out = redact_lexicon(tokenize("ice skating fan"), both);
    CHECK(out.tokens == std::vector<std::string>{"[DEL]", "fan"});
}

TEST_CASE("redact_lexicon: matches never span an existing marker") {
    Lexicon phrase = lex({"table tennis"});
    TokenStream in = tokenize("table [DEL] tennis");
    TokenStream out = redact_lexicon(in, phrase);
    CHECK(out.tokens == std::vector<std::string>{"table", "[DEL]", "tennis"});
}

TEST_CASE("redact_lexicon: agrees with the naive scanner on random streams") {
    Rng rng(99);
    std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
    for (int round = 0; round < 300; ++round) {
        // random lexicon of 1-3 token phrases
        std::set<std::vector<std::string>> phrases;
        std::vector<std::string> entries;
        size_t n_entries = 1 + rng.uniform_index(4);
        for (size_t p = 0; p < n_entries; ++p) {
            size_t len = 1 + rng.uniform_index(3);
            std::vector<std::string> phrase;
            for (size_t i = 0; i < len; ++i) phrase.push_back(vocab[rng.uniform_index(6)]);
            phrases.insert(phrase);
            entries.push_back(join(phrase, " "));
        }
        std::vector<std::string> tokens;
        size_t len = rng.uniform_index(16);
        for (size_t i = 0; i < len; ++i) {
            tokens.push_back(rng.bernoulli(0.1) ? "[DEL]" : vocab[rng.uniform_index(6)]);
        }
        TokenStream out = redact_lexicon(stream_of(tokens), lex(entries));
        CHECK(out.tokens == naive_phrase_redact(tokens, phrases));
    }
}

TEST_CASE("redact_lexicon: monotone token count and vocabulary disjointness") {
    Lexicon hobby = lex({"table tennis", "chess", "rock climbing"});
    TokenStream in = tokenize("plays chess and table tennis and rock climbing daily");
    TokenStream out = redact_lexicon(in, hobby);
    // one 1-token match and two 2-token matches
    CHECK(out.size() == in.size() - 2);
    for (const std::string& t : out.tokens) {
        CHECK_FALSE(hobby.contains_token(t));
    }
    // idempotence
    TokenStream again = redact_lexicon(out, hobby);
    CHECK(again.tokens == out.tokens);
}

TEST_CASE("lexicon loading: normalization, comments, and the marker guard") {
    Lexicon loaded = lex({"Table Tennis!", "CHESS"});
    CHECK(loaded.contains_phrase("table tennis"));
    CHECK(loaded.contains_token("chess"));
    CHECK_THROWS_AS(lex({}), DataError);
    CHECK_THROWS_AS(lex({"[DEL]"}), DataError);
}

TEST_CASE("apply_plan: empty plan returns the resume unchanged") {
    Resume r;
    r.id = "R1";
    r.applicant_name = "John Doe";
    r.gender = Gender::Male;
    r.raw_text = "john doe waitress";
    PiiRedactor pii({"john"});
    Resume out = apply_plan(r, RedactionPlan{}, {}, pii);
    CHECK(out.raw_text == r.raw_text);
    CHECK(out.id == r.id);
}

TEST_CASE("apply_plan: pii then gender words on an ats-style sample") {
    Resume r;
    r.id = "R1";
    r.applicant_name = "John Doe";
    r.gender = Gender::Male;
    r.raw_text =
        "john doe\n123 center st. new york, ny\neducation\n"
        "b.s computer science nyu, ny - may 2015\nexperience\n"
        "waiter and chairman of the chess club\nskills\nflask, python, keras and ajax";
    RedactionPlan plan = RedactionPlan::parse("pii,gender_words");
    std::map<std::string, Lexicon> lexicons;
    lexicons.emplace("gender_words", Lexicon::load("gender_words",
                                                   std::string(kDataDir) + "/gender_words.txt"));
    PiiRedactor pii({"john", "jane"});
    Resume out = apply_plan(r, plan, lexicons, pii);

    Lexicon gender_words = lexicons.at("gender_words");
    for (const std::string& t : tokenize(out.raw_text).tokens) {
        CHECK(t != "john");
        CHECK(t != "doe");
        CHECK_FALSE(gender_words.contains_token(t));
    }
    // only raw_text changes
    CHECK(out.applicant_name == r.applicant_name);
    CHECK(out.gender == r.gender);
    // non-pii content survives
    CHECK(out.raw_text.find("flask, python, keras and ajax") != std::string::npos);
}

TEST_CASE("apply_plan: unknown lexicon is a data error naming it") {
    Resume r;
    r.id = "R1";
    r.applicant_name = "John Doe";
    r.raw_text = "text";
    RedactionPlan plan = RedactionPlan::parse("missing_lexicon");
    PiiRedactor pii({});
    CHECK_THROWS_WITH_AS(apply_plan(r, plan, {}, pii),
                         doctest::Contains("missing_lexicon"), DataError);
}

TEST_CASE("apply_plan: disjoint lexicon passes commute") {
    Rng rng(31);
    std::vector<std::string> vocab = {"u", "v", "w", "x", "y", "z", "p", "q"};
    PiiRedactor pii({});
    for (int round = 0; round < 40; ++round) {
        std::vector<std::string> shuffled = vocab;
        rng.shuffle(shuffled);
        std::vector<std::string> a_entries(shuffled.begin(), shuffled.begin() + 2);
        std::vector<std::string> b_entries(shuffled.begin() + 2, shuffled.begin() + 4);
        std::map<std::string, Lexicon> lexicons;
        lexicons.emplace("a", Lexicon::from_entries("a", a_entries));
        lexicons.emplace("b", Lexicon::from_entries("b", b_entries));

        Resume r;
        r.id = "R1";
        r.applicant_name = "None Such";
        std::string text;
        for (int i = 0; i < 12; ++i) {
            if (i) text += ' ';
            text += vocab[rng.uniform_index(vocab.size())];
        }
        r.raw_text = text;

        Resume ab = apply_plan(apply_plan(r, RedactionPlan::parse("a"), lexicons, pii),
                               RedactionPlan::parse("b"), lexicons, pii);
        Resume ba = apply_plan(apply_plan(r, RedactionPlan::parse("b"), lexicons, pii),
                               RedactionPlan::parse("a"), lexicons, pii);
        CHECK(ab.raw_text == ba.raw_text);
    }
}

TEST_CASE("redaction plan parsing") {
    RedactionPlan plan = RedactionPlan::parse("pii,gender_words,token_list:/tmp/x.csv");
    REQUIRE(plan.passes.size() == 3);
    CHECK(plan.passes[0].kind == RedactionPass::Kind::Pii);
    CHECK(plan.passes[1].kind == RedactionPass::Kind::Lexicon);
    CHECK(plan.passes[2].kind == RedactionPass::Kind::TokenList);
    CHECK(plan.to_string() == "pii,gender_words,token_list:/tmp/x.csv");
    CHECK_THROWS_AS(RedactionPlan::parse("pii,pii"), UsageError);
    CHECK_THROWS_AS(RedactionPlan::parse("token_list:"), UsageError);
}

TEST_CASE("token_list loader: plain lists and ranking csvs") {
    std::string plain = std::string(kDataDir) + "/../build/test_token_list_plain.txt";
    write_file(plain, "alpha\nbeta\n# comment\n");
    Lexicon from_plain = Lexicon::load_token_list("t", plain);
    CHECK(from_plain.contains_token("alpha"));
    CHECK(from_plain.contains_token("beta"));

    std::string csv = std::string(kDataDir) + "/../build/test_token_list_ranking.csv";
    write_file(csv, "token,mean_abs,signed_mean,direction\ngamma,1.5,0.2,male_leaning\n");
    Lexicon from_csv = Lexicon::load_token_list("t", csv);
    CHECK(from_csv.size() == 1);
    CHECK(from_csv.contains_token("gamma"));
}
