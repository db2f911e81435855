#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace degender {

// One flat key/value configuration shared by the C API, the CLI, config
// files, and run manifests. Keys are validated against a registry with
// per-key defaults; get() always returns the effective value. Custom lexicon
// bindings use the dynamic prefix "lexicon.<name>".
class Params {
public:
    void set(const std::string& key, const std::string& value);
    bool is_set(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key) const;
    uint64_t get_u64(const std::string& key) const;
    size_t get_size(const std::string& key) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    // every registry key (plus set lexicon.* bindings) with effective values
    std::map<std::string, std::string> effective() const;
    const std::map<std::string, std::string>& explicit_values() const { return values_; }

    // "key = value" lines, '#' comments ignored
    static Params from_file(const std::string& path);
    // values in `overrides` win
    void merge(const Params& overrides);

    struct KeyInfo {
        std::string default_value;
        std::string description;
    };
    static const std::map<std::string, KeyInfo>& registry();

private:
    std::map<std::string, std::string> values_;
};

}  // namespace degender
