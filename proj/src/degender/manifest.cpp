#include "degender/manifest.hpp"

#include <cstdio>

#include "json.hpp"

#include "degender/rng.hpp"
#include "degender/util.hpp"

namespace degender {

std::string content_hash(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string file_content_hash(const std::string& path) {
    return content_hash(read_file(path));
}

void write_manifest(const std::string& path, const std::string& command, const Params& params,
                    const std::map<std::string, std::string>& input_hashes) {
    nlohmann::json obj;
    obj["command"] = command;
    obj["tool_version"] = kToolVersion;
    obj["seed"] = params.get_u64("seed");
    obj["config_echo"] = params.effective();
    obj["input_hashes"] = input_hashes;
    write_file(path, obj.dump(2) + "\n");
}

}  // namespace degender
