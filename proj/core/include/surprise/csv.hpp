#ifndef SURPRISE_CSV_HPP_
#define SURPRISE_CSV_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace surprise {

// Versioned run-log schema. The schema comment line precedes the header row;
// parse_csv_file round-trips everything the writer emits.
inline constexpr int kCsvSchemaVersion = 1;

const std::vector<std::string>& csv_columns();
std::size_t csv_column_index(const std::string& name);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void append(const std::vector<double>& row);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct CsvFile {
  int schema_version = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

CsvFile parse_csv_file(const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace surprise

#endif  // SURPRISE_CSV_HPP_
