#include "delaynav/csv.hpp"

#include <cstdio>
#include <sstream>

#include "delaynav/errors.hpp"

namespace delaynav {

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) {
        throw IoError("cannot open for writing: " + path);
    }
}

void CsvWriter::header(const std::string& line) { out_ << line << "\n"; }

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << "\n";
    if (!out_) {
        throw IoError("write failed: " + path_);
    }
}

std::string CsvWriter::num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            table.header = line;
            first = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        table.rows.push_back(std::move(cells));
    }
    return table;
}

}  // namespace delaynav
