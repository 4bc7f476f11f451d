#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "bpt/common.hpp"

namespace bpt {

// Formats a double with enough digits to round-trip, stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Minimal CSV emitter: one header row, then data rows. Values are written
// verbatim; callers quote nothing because all schemas here are numeric or
// simple identifiers.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw FormatError("cannot open for writing: " + path);
    }

    void header(const std::vector<std::string>& cols) { row(cols); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

}  // namespace bpt
