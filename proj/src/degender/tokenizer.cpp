#include "degender/tokenizer.hpp"

#include <cctype>

namespace degender {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

// '_' counts as a word character so assembled keys like job_loc survive;
// bytes >= 0x80 are kept so UTF-8 sequences are never split.
bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c >= 0x80;
}

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

bool marker_at(std::string_view text, size_t pos) {
    return text.compare(pos, kDeletedMarker.size(), kDeletedMarker) == 0;
}

// A whitespace-delimited chunk stays in one piece when it looks like an
// email or URL; punctuation only splits ordinary words.
bool chunk_is_atomic(std::string_view lowered) {
    if (lowered.find('@') != std::string_view::npos) return true;
    if (lowered.rfind("http://", 0) == 0) return true;
    if (lowered.rfind("https://", 0) == 0) return true;
    if (lowered.rfind("www.", 0) == 0) return true;
    if (lowered.find("linkedin.com/") != std::string_view::npos) return true;
    return false;
}

}  // namespace

bool is_email_token(std::string_view token) {
    size_t at = token.find('@');
    if (at == std::string_view::npos || at == 0) return false;
    if (token.find('@', at + 1) != std::string_view::npos) return false;
    std::string_view domain = token.substr(at + 1);
    size_t dot = domain.find('.');
    return dot != std::string_view::npos && dot > 0 && dot + 1 < domain.size();
}

bool is_url_token(std::string_view token) {
    return token.rfind("http://", 0) == 0 || token.rfind("https://", 0) == 0 ||
           token.rfind("www.", 0) == 0;
}

bool is_linkedin_token(std::string_view token) {
    return token.find("linkedin.com/") != std::string_view::npos;
}

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    const size_t n = text.size();
    size_t pos = 0;
    while (pos < n) {
        if (is_space(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            continue;
        }
        size_t chunk_end = pos;
        while (chunk_end < n && !is_space(static_cast<unsigned char>(text[chunk_end]))) {
            ++chunk_end;
        }
        std::string lowered = to_lower(text.substr(pos, chunk_end - pos));
        if (!marker_at(text, pos) && chunk_is_atomic(lowered)) {
            size_t b = pos, e = chunk_end;
            while (b < e && !is_alnum(static_cast<unsigned char>(text[b]))) ++b;
            while (e > b && !is_alnum(static_cast<unsigned char>(text[e - 1]))) --e;
            if (b < e) {
                out.tokens.push_back(to_lower(text.substr(b, e - b)));
                out.spans.push_back({b, e});
            }
            pos = chunk_end;
            continue;
        }
        while (pos < chunk_end) {
            if (marker_at(text, pos)) {
                out.tokens.emplace_back(kDeletedMarker);
                out.spans.push_back({pos, pos + kDeletedMarker.size()});
                pos += kDeletedMarker.size();
                continue;
            }
            if (!is_word_char(static_cast<unsigned char>(text[pos]))) {
                ++pos;
                continue;
            }
            size_t b = pos;
            while (pos < chunk_end && is_word_char(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            }
            out.tokens.push_back(to_lower(text.substr(b, pos - b)));
            out.spans.push_back({b, pos});
        }
        pos = chunk_end;
    }
    return out;
}

std::string render(std::string_view source, const TokenStream& stream) {
    std::string out;
    out.reserve(source.size());
    size_t cursor = 0;
    for (size_t i = 0; i < stream.size(); ++i) {
        const Span& s = stream.spans[i];
        out.append(source.substr(cursor, s.begin - cursor));
        if (stream.tokens[i] == kDeletedMarker) {
            out.append(kDeletedMarker);
        } else {
            out.append(source.substr(s.begin, s.end - s.begin));
        }
        cursor = s.end;
    }
    out.append(source.substr(cursor));
    return out;
}

}  // namespace degender
