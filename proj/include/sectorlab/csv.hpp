#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sectorlab/error.hpp"

namespace sectorlab {
namespace csv {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

// Plain comma split; fields in this project never contain commas or quotes.
inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based line number of each row in the source file, for error messages.
    std::vector<int> line_numbers;
};

inline Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open file: " + path);
    }
    Table t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (line_no == 1) {
            t.header = split_line(line);
            continue;
        }
        if (stripped.empty()) continue;
        t.rows.push_back(split_line(line));
        t.line_numbers.push_back(line_no);
    }
    if (t.header.empty()) {
        throw Error("empty file (missing header row): " + path);
    }
    return t;
}

// Shortest round-trip decimal form of a double; identical output for
// identical bit patterns, which keeps emitted CSVs byte-stable.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    for (int prec = 1; prec <= 16; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        std::sscanf(shorter, "%lf", &back);
        if (back == v) return std::string(shorter);
    }
    return std::string(buf);
}

inline double parse_double(const std::string& s, const std::string& context) {
    if (s.empty()) {
        throw Error("empty numeric field (" + context + ")");
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw Error("unparseable number '" + s + "' (" + context + ")");
    }
    if (pos != s.size()) {
        throw Error("unparseable number '" + s + "' (" + context + ")");
    }
    return v;
}

inline int parse_int(const std::string& s, const std::string& context) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw Error("unparseable integer '" + s + "' (" + context + ")");
    }
    if (pos != s.size()) {
        throw Error("unparseable integer '" + s + "' (" + context + ")");
    }
    return v;
}

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), out_(path) {
        if (!out_) throw Error("cannot open file for writing: " + path);
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) throw Error("write failed: " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

} // namespace csv
} // namespace sectorlab
