#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "decotunnel/errors.hpp"

namespace decotunnel::csv {

// Shortest decimal representation that round-trips to the same double.
// Locale-independent; '.' separator always.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Deterministic CSV emitter: LF line endings, no locale dependence,
// doubles emitted with full round-trip precision.
class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
    }

    void header(const std::vector<std::string>& cols) { row_strings(cols); }

    void field(double v) { push(format_double(v)); }
    void field(std::int64_t v) { push(format_int(v)); }
    void field(int v) { push(format_int(v)); }
    void field(std::string_view s) { push(std::string(s)); }

    void end_row() {
        out_ << line_ << '\n';
        line_.clear();
        first_ = true;
    }

    void row_strings(const std::vector<std::string>& cols) {
        for (const auto& c : cols) push(c);
        end_row();
    }

private:
    void push(const std::string& s) {
        if (!first_) line_ += ',';
        line_ += s;
        first_ = false;
    }

    std::ofstream out_;
    std::string line_;
    bool first_ = true;
};

}  // namespace decotunnel::csv
