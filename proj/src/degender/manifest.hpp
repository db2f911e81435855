#pragma once

#include <map>
#include <string>

#include "degender/params.hpp"

namespace degender {

inline constexpr const char* kToolVersion = "0.1.0";

std::string content_hash(std::string_view bytes);
std::string file_content_hash(const std::string& path);

// Written alongside every output artifact: the command, the fully resolved
// configuration, the master seed, and a content hash per input file. No
// timestamps, so reruns are byte-identical.
void write_manifest(const std::string& path, const std::string& command, const Params& params,
                    const std::map<std::string, std::string>& input_hashes);

}  // namespace degender
