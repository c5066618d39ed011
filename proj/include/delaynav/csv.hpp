#ifndef DELAYNAV_CSV_HPP
#define DELAYNAV_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

namespace delaynav {

/// Minimal CSV writer; throws IoError when the file cannot be opened.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    void header(const std::string& line);
    void row(const std::vector<std::string>& cells);
    static std::string num(double v);

  private:
    std::ofstream out_;
    std::string path_;
};

struct CsvTable {
    std::string header;
    std::vector<std::vector<std::string>> rows;
};

/// Read a whole CSV file (first line is the header). Throws IoError.
CsvTable read_csv(const std::string& path);

}  // namespace delaynav

#endif  // DELAYNAV_CSV_HPP
