#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "takeup/common.hpp"

namespace takeup {

// Delimited-text tables. Comma-separated, first line is the header, no
// quoting (fields never contain commas; member lists use ':' and '|').
// Missing values are spelled "NA".

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            out.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

class Table {
  public:
    Table() = default;
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {
        index_columns();
    }

    static Table read_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw MissingInputError("cannot open input file: " + path);
        Table t;
        std::string line;
        if (!std::getline(in, line)) throw SchemaError("empty table: " + path);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        t.header_ = split(line, ',');
        t.index_columns();
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto row = split(line, ',');
            if (row.size() != t.header_.size()) {
                throw SchemaError(path + ": row " + std::to_string(t.rows_.size() + 2) +
                                  " has " + std::to_string(row.size()) + " fields, expected " +
                                  std::to_string(t.header_.size()));
            }
            t.rows_.push_back(std::move(row));
        }
        return t;
    }

    void write_file(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw DomainError("cannot open output file: " + path);
        out << join(header_) << '\n';
        for (const auto& r : rows_) out << join(r) << '\n';
        if (!out) throw DomainError("write failed: " + path);
    }

    void require_columns(const std::vector<std::string>& names, const std::string& ctx) const {
        for (const auto& n : names) {
            if (!col_.count(n)) throw SchemaError(ctx + ": missing column '" + n + "'");
        }
    }

    std::size_t col(const std::string& name) const {
        auto it = col_.find(name);
        if (it == col_.end()) throw SchemaError("unknown column '" + name + "'");
        return it->second;
    }
    bool has_col(const std::string& name) const { return col_.count(name) != 0; }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    const std::string& at(std::size_t row, const std::string& name) const {
        return rows_[row][col(name)];
    }

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size()) throw SchemaError("row width mismatch");
        rows_.push_back(std::move(row));
    }

  private:
    void index_columns() {
        for (std::size_t i = 0; i < header_.size(); ++i) col_[header_[i]] = i;
        if (col_.size() != header_.size()) throw SchemaError("duplicate column names");
    }
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += v[i];
        }
        return s;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::unordered_map<std::string, std::size_t> col_;
};

inline bool is_na(const std::string& s) { return s == "NA"; }

inline double parse_double(const std::string& s) {
    double v{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw SchemaError("malformed number: '" + s + "'");
    return v;
}

inline long parse_long(const std::string& s) {
    long v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw SchemaError("malformed integer: '" + s + "'");
    return v;
}

inline bool parse_flag(const std::string& s) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw SchemaError("malformed flag (want 0/1): '" + s + "'");
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string fmt_flag(bool b) { return b ? "1" : "0"; }

}  // namespace takeup
