#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace degender {

// Literal replacement marker for every redacted token. It is emitted as a
// single token by the tokenizer and excluded from every model vocabulary.
inline constexpr std::string_view kDeletedMarker = "[DEL]";

struct Span {
    size_t begin = 0;  // byte offsets into the source text
    size_t end = 0;

    bool operator==(const Span&) const = default;
};

// Lowercased word tokens plus the byte range each token came from. Spans are
// strictly increasing and non-overlapping; for ordinary tokens the lowercased
// covered bytes equal the token. Tokens introduced by redaction are the
// literal [DEL] marker whose span still covers the replaced source bytes, so
// render() can rebuild the redacted text.
struct TokenStream {
    std::vector<std::string> tokens;
    std::vector<Span> spans;

    size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// Lowercases and splits on anything that is not [a-z0-9_] or a non-ASCII
// byte, except that whitespace-delimited chunks that look like emails or
// URLs are kept whole (surrounding punctuation trimmed), and the [DEL]
// marker always survives as one token.
TokenStream tokenize(std::string_view text);

// Rebuilds text from a possibly redacted stream: bytes outside token spans
// are copied verbatim, [DEL] tokens print as the marker, everything else
// prints its original bytes.
std::string render(std::string_view source, const TokenStream& stream);

// Exactly one '@' with a non-empty local part and a dotted domain.
bool is_email_token(std::string_view token);
// Starts with http://, https://, or www.
bool is_url_token(std::string_view token);
// Contains "linkedin.com/".
bool is_linkedin_token(std::string_view token);

}  // namespace degender
