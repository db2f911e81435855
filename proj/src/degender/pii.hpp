#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "degender/corpus.hpp"

namespace degender {

struct RedactionResult {
    std::string redacted_text;
    size_t n_replaced = 0;
    // categories: name, email, url, linkedin_id (zero-count keys omitted)
    std::map<std::string, size_t> replaced_categories;
};

// Removes applicant-name tokens (string match against the name's own parts,
// minimum two characters), dictionary first names, emails, LinkedIn IDs and
// other URLs, replacing each token with [DEL].
class PiiRedactor {
public:
    explicit PiiRedactor(std::set<std::string> first_names);
    static PiiRedactor load(const std::vector<std::string>& name_list_paths);

    RedactionResult redact(const Resume& resume) const;
    std::string redact_text(std::string_view text, const std::string& applicant_name) const;

    const std::set<std::string>& first_names() const { return first_names_; }

private:
    RedactionResult redact_impl(std::string_view text,
                                const std::string& applicant_name) const;

    std::set<std::string> first_names_;
};

}  // namespace degender
