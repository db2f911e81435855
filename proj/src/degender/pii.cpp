#include "degender/pii.hpp"

#include "degender/errors.hpp"
#include "degender/tokenizer.hpp"
#include "degender/util.hpp"

namespace degender {

PiiRedactor::PiiRedactor(std::set<std::string> first_names)
    : first_names_(std::move(first_names)) {}

PiiRedactor PiiRedactor::load(const std::vector<std::string>& name_list_paths) {
    std::set<std::string> names;
    for (const std::string& path : name_list_paths) {
        for (const std::string& entry : read_wordlist(path)) {
            for (std::string& token : tokenize(entry).tokens) {
                names.insert(std::move(token));
            }
        }
    }
    return PiiRedactor(std::move(names));
}

RedactionResult PiiRedactor::redact_impl(std::string_view text,
                                         const std::string& applicant_name) const {
    if (applicant_name.empty()) {
        throw UsageError("redact_pii: applicant_name is empty");
    }
    // Single-character name parts (middle initials) are not redacted.
    std::set<std::string> name_parts;
    for (const std::string& part : tokenize(applicant_name).tokens) {
        if (part.size() >= 2) name_parts.insert(part);
    }

    TokenStream stream = tokenize(text);
    RedactionResult result;
    for (std::string& token : stream.tokens) {
        if (token == kDeletedMarker) continue;
        const char* category = nullptr;
        if (is_email_token(token)) {
            category = "email";
        } else if (is_linkedin_token(token)) {
            category = "linkedin_id";
        } else if (is_url_token(token)) {
            category = "url";
        } else if (name_parts.count(token) || first_names_.count(token)) {
            category = "name";
        }
        if (category) {
            token = std::string(kDeletedMarker);
            ++result.n_replaced;
            ++result.replaced_categories[category];
        }
    }
    result.redacted_text = render(text, stream);
    return result;
}

RedactionResult PiiRedactor::redact(const Resume& resume) const {
    return redact_impl(resume.raw_text, resume.applicant_name);
}

std::string PiiRedactor::redact_text(std::string_view text,
                                     const std::string& applicant_name) const {
    return redact_impl(text, applicant_name).redacted_text;
}

}  // namespace degender
