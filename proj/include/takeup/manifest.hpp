#pragma once

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "takeup/common.hpp"
#include "takeup/rng.hpp"

namespace takeup {

// Machine-readable record of one pipeline stage run. Every output directory
// carries exactly one manifest; the timestamp honours SOURCE_DATE_EPOCH so
// reruns with a pinned epoch are byte-identical.
struct RunManifest {
    std::string subcommand;
    std::string config_path;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> options;

    static std::string timestamp() {
        std::time_t t;
        if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
            t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
        } else {
            t = std::time(nullptr);
        }
        char buf[32];
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::uint64_t options_hash() const {
        std::string canon = subcommand + "|" + config_path + "|" + std::to_string(seed);
        for (const auto& i : inputs) canon += "|i:" + i;
        for (const auto& o : outputs) canon += "|o:" + o;
        for (const auto& [k, v] : options) canon += "|" + k + "=" + v;
        return fnv1a(canon);
    }

    void write(const std::string& dir) const {
        nlohmann::json j;
        j["subcommand"] = subcommand;
        j["config"] = config_path;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["seed"] = seed;
        j["version"] = kVersion;
        j["timestamp"] = timestamp();
        char hash[24];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(options_hash()));
        j["options_hash"] = hash;
        j["options"] = options;
        std::ofstream out(dir + "/manifest.json");
        if (!out) throw DomainError("cannot write manifest in " + dir);
        out << j.dump(2) << '\n';
    }
};

}  // namespace takeup
