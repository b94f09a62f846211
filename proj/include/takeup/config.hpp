#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "takeup/common.hpp"
#include "takeup/csv.hpp"

namespace takeup {

// Block-structured text configuration:
//
//   [policy 2020]
//   standard_rate_single = 432
//   standard_rate_child = 0-5:250 6-13:308 14-17:328 18-24:345
//
// Sections repeat (one policy block per year); keys within a section are
// unique. '#' starts a comment.

class Config {
  public:
    struct Section {
        std::string name;  // full bracket text, e.g. "policy 2020"
        std::map<std::string, std::string> values;

        bool has(const std::string& key) const { return values.count(key) != 0; }

        const std::string& get(const std::string& key) const {
            auto it = values.find(key);
            if (it == values.end())
                throw ConfigError("section [" + name + "] missing key '" + key + "'");
            return it->second;
        }
        std::string get_or(const std::string& key, const std::string& dflt) const {
            auto it = values.find(key);
            return it == values.end() ? dflt : it->second;
        }
        double get_double(const std::string& key) const { return parse_double(get(key)); }
        double get_double_or(const std::string& key, double dflt) const {
            return has(key) ? parse_double(get(key)) : dflt;
        }
        long get_long(const std::string& key) const { return parse_long(get(key)); }
        long get_long_or(const std::string& key, long dflt) const {
            return has(key) ? parse_long(get(key)) : dflt;
        }
    };

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw MissingInputError("cannot open config file: " + path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return parse(text, path);
    }

    static Config parse(const std::string& text, const std::string& ctx = "<string>") {
        Config cfg;
        Section* current = nullptr;
        std::size_t lineno = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) eol = text.size();
            std::string line = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(ctx + ":" + std::to_string(lineno) + ": unterminated section");
                cfg.sections_.push_back(Section{trim(line.substr(1, line.size() - 2)), {}});
                current = &cfg.sections_.back();
            } else {
                auto eq = line.find('=');
                if (eq == std::string::npos || current == nullptr)
                    throw ConfigError(ctx + ":" + std::to_string(lineno) + ": expected key = value");
                std::string key = trim(line.substr(0, eq));
                std::string val = trim(line.substr(eq + 1));
                if (key.empty()) throw ConfigError(ctx + ":" + std::to_string(lineno) + ": empty key");
                if (!current->values.emplace(key, val).second)
                    throw ConfigError(ctx + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            }
            if (eol == text.size()) break;
        }
        return cfg;
    }

    const std::vector<Section>& sections() const { return sections_; }

    std::vector<const Section*> sections_named(const std::string& prefix) const {
        std::vector<const Section*> out;
        for (const auto& s : sections_) {
            if (s.name == prefix || s.name.rfind(prefix + " ", 0) == 0) out.push_back(&s);
        }
        return out;
    }

    const Section* find(const std::string& name) const {
        for (const auto& s : sections_)
            if (s.name == name) return &s;
        return nullptr;
    }

    const Section& require(const std::string& name) const {
        const Section* s = find(name);
        if (!s) throw ConfigError("missing config section [" + name + "]");
        return *s;
    }

  private:
    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    std::vector<Section> sections_;
};

}  // namespace takeup
