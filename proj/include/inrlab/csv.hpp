#ifndef INRLAB_CSV_HPP
#define INRLAB_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "inrlab/errors.hpp"

namespace inrlab {

// Shortest text form that parses back to the same double (17 significant
// digits), used for every numeric artifact so reruns are byte-identical.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Minimal CSV writer: header row mandatory, '.' decimals, LF endings.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw IoError("cannot open for writing: " + path);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
        columns_ = header.size();
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw ArgumentError("csv: row width mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_double(values[i]);
        }
        out_ << '\n';
    }

    void raw_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw ArgumentError("csv: row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    ~CsvWriter() = default;

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

} // namespace inrlab

#endif
