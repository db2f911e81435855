#include "degender/lexicon.hpp"

#include <set>

#include "degender/errors.hpp"
#include "degender/pii.hpp"
#include "degender/util.hpp"

namespace degender {

Lexicon Lexicon::from_entries(std::string name, std::span<const std::string> entries) {
    Lexicon lex;
    lex.name_ = std::move(name);
    for (const std::string& raw : entries) {
        TokenStream entry = tokenize(raw);
        if (entry.empty()) continue;
        std::string joined = join(entry.tokens, " ");
        if (joined == kDeletedMarker || joined.find(kDeletedMarker) != std::string::npos) {
            throw DataError("lexicon \"" + lex.name_ + "\" contains the " +
                            std::string(kDeletedMarker) + " marker");
        }
        lex.joined_.insert(joined);
        lex.first_tokens_.insert(entry.tokens.front());
        if (entry.size() == 1) lex.singles_.insert(joined);
        lex.max_len_ = std::max(lex.max_len_, entry.size());
    }
    if (lex.joined_.empty()) {
        throw DataError("lexicon \"" + lex.name_ + "\" has no entries");
    }
    return lex;
}

Lexicon Lexicon::load(std::string name, const std::string& path) {
    std::vector<std::string> lines = read_wordlist(path);
    try {
        return from_entries(std::move(name), lines);
    } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " (loaded from " + path + ")");
    }
}

Lexicon Lexicon::load_token_list(std::string name, const std::string& path) {
    std::vector<std::string> entries;
    bool first_line = true;
    for (const std::string& line : read_wordlist(path)) {
        std::string column = trim(split(line, ',').front());
        if (first_line && column == "token") {
            first_line = false;
            continue;
        }
        first_line = false;
        if (!column.empty()) entries.push_back(column);
    }
    try {
        return from_entries(std::move(name), entries);
    } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " (loaded from " + path + ")");
    }
}

TokenStream redact_lexicon(const TokenStream& in, const Lexicon& lex) {
    TokenStream out;
    out.tokens.reserve(in.size());
    out.spans.reserve(in.size());
    const size_t n = in.size();
    size_t i = 0;
    while (i < n) {
        size_t match_len = 0;
        if (in.tokens[i] != kDeletedMarker && lex.has_first_token(in.tokens[i])) {
            size_t limit = std::min(lex.max_phrase_len(), n - i);
            // a phrase can never span an already-redacted token
            for (size_t len = 1; len < limit; ++len) {
                if (in.tokens[i + len] == kDeletedMarker) {
                    limit = len;
                    break;
                }
            }
            std::string joined;
            std::vector<size_t> ends(limit);
            for (size_t len = 1; len <= limit; ++len) {
                if (len > 1) joined += ' ';
                joined += in.tokens[i + len - 1];
                ends[len - 1] = joined.size();
            }
            for (size_t len = limit; len >= 1; --len) {
                if (lex.contains_phrase(joined.substr(0, ends[len - 1]))) {
                    match_len = len;
                    break;
                }
            }
        }
        if (match_len > 0) {
            out.tokens.emplace_back(kDeletedMarker);
            out.spans.push_back({in.spans[i].begin, in.spans[i + match_len - 1].end});
            i += match_len;
        } else {
            out.tokens.push_back(in.tokens[i]);
            out.spans.push_back(in.spans[i]);
            ++i;
        }
    }
    return out;
}

std::string RedactionPass::key() const {
    return kind == Kind::TokenList ? "token_list:" + name : name;
}

RedactionPlan RedactionPlan::parse(const std::string& spec) {
    RedactionPlan plan;
    std::set<std::string> seen;
    for (const std::string& raw : split(spec, ',')) {
        std::string item = trim(raw);
        if (item.empty()) continue;
        RedactionPass pass;
        if (item == "pii") {
            pass.kind = RedactionPass::Kind::Pii;
            pass.name = "pii";
        } else if (item.rfind("token_list:", 0) == 0) {
            pass.kind = RedactionPass::Kind::TokenList;
            pass.name = item.substr(std::string("token_list:").size());
            if (pass.name.empty()) {
                throw UsageError("redaction plan: token_list pass needs a path");
            }
        } else {
            pass.kind = RedactionPass::Kind::Lexicon;
            pass.name = item;
        }
        if (!seen.insert(pass.key()).second) {
            throw UsageError("redaction plan: duplicate pass \"" + item + "\"");
        }
        plan.passes.push_back(std::move(pass));
    }
    return plan;
}

std::string RedactionPlan::to_string() const {
    std::vector<std::string> parts;
    for (const RedactionPass& pass : passes) parts.push_back(pass.key());
    return join(parts, ",");
}

std::string apply_plan_text(const std::string& text, const std::string& applicant_name,
                            const RedactionPlan& plan,
                            const std::map<std::string, Lexicon>& lexicons,
                            const PiiRedactor& pii) {
    std::string current = text;
    for (const RedactionPass& pass : plan.passes) {
        if (pass.kind == RedactionPass::Kind::Pii) {
            current = pii.redact_text(current, applicant_name);
            continue;
        }
        auto it = lexicons.find(pass.key());
        if (it == lexicons.end()) {
            throw DataError("redaction plan references unknown lexicon \"" + pass.name + "\"");
        }
        TokenStream redacted = redact_lexicon(tokenize(current), it->second);
        current = render(current, redacted);
    }
    return current;
}

Resume apply_plan(const Resume& resume, const RedactionPlan& plan,
                  const std::map<std::string, Lexicon>& lexicons,
                  const PiiRedactor& pii) {
    Resume out = resume;
    out.raw_text = apply_plan_text(resume.raw_text, resume.applicant_name, plan, lexicons, pii);
    return out;
}

}  // namespace degender
