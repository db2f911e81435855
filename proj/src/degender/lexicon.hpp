#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "degender/corpus.hpp"
#include "degender/tokenizer.hpp"

namespace degender {

// A named set of lowercase tokens and phrases driving one redaction pass.
// Entries are normalized through the document tokenizer, so "Table Tennis!"
// in a lexicon file matches the token sequence ["table", "tennis"].
class Lexicon {
public:
    Lexicon() = default;

    static Lexicon from_entries(std::string name, std::span<const std::string> entries);
    // One entry per line, '#' comments ignored, spaces allowed for phrases.
    static Lexicon load(std::string name, const std::string& path);
    // First comma-separated column of each line; a leading "token" header row
    // is skipped, so feature-ranking CSVs are directly consumable.
    static Lexicon load_token_list(std::string name, const std::string& path);

    const std::string& name() const { return name_; }
    size_t size() const { return joined_.size(); }
    size_t max_phrase_len() const { return max_len_; }

    bool contains_token(const std::string& token) const { return singles_.count(token) != 0; }
    bool contains_phrase(const std::string& space_joined) const {
        return joined_.count(space_joined) != 0;
    }
    bool has_first_token(const std::string& token) const {
        return first_tokens_.count(token) != 0;
    }

    const std::set<std::string>& single_tokens() const { return singles_; }
    const std::set<std::string>& entries() const { return joined_; }

private:
    std::string name_;
    std::set<std::string> joined_;        // every entry, space-joined
    std::set<std::string> singles_;       // one-token entries
    std::set<std::string> first_tokens_;  // first token of every entry
    size_t max_len_ = 0;
};

// Longest-match, left-to-right phrase replacement: every maximal lexicon
// match becomes a single [DEL] token whose span covers the replaced bytes.
TokenStream redact_lexicon(const TokenStream& tokens, const Lexicon& lex);

struct RedactionPass {
    enum class Kind { Pii, Lexicon, TokenList };
    Kind kind = Kind::Lexicon;
    std::string name;  // lexicon name, or path for token_list passes
    std::string key() const;
};

struct RedactionPlan {
    std::vector<RedactionPass> passes;

    // "pii,gender_words,token_list:ranking.csv"; pass names must be unique.
    static RedactionPlan parse(const std::string& spec);
    std::string to_string() const;
    bool empty() const { return passes.empty(); }
};

class PiiRedactor;

// Applies the plan's passes in order; output differs from the input only in
// raw_text. Lexicon and token_list passes must be present in `lexicons`,
// keyed by RedactionPass::key().
Resume apply_plan(const Resume& resume, const RedactionPlan& plan,
                  const std::map<std::string, Lexicon>& lexicons,
                  const PiiRedactor& pii);

std::string apply_plan_text(const std::string& text, const std::string& applicant_name,
                            const RedactionPlan& plan,
                            const std::map<std::string, Lexicon>& lexicons,
                            const PiiRedactor& pii);

}  // namespace degender
