#include "surprise/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace surprise {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "iteration",        "steps_total",
      "ret_ext_mean",     "ret_ext_median_episode",
      "bonus_mean_raw",   "eta",
      "policy_kl",        "dynamics_nll",
      "dynamics_kl_step", "wall_ms",
      "bonus_std_raw",    "bonus_min_raw",
      "bonus_max_raw",    "shift",
      "bonus_ms",         "model_update_ms"};
  return cols;
}

std::size_t csv_column_index(const std::string& name) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == name) return i;
  }
  throw std::invalid_argument("csv_column_index: unknown column " + name);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Integers (iteration, step counts, flags) print without an exponent.
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path)
    : path_(path), out_(path) {
  if (!out_) {
    throw std::runtime_error("CsvWriter: cannot open " + path.string());
  }
  out_ << "# surprise-rl-csv v" << kCsvSchemaVersion << "\n";
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out_ << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  }
  out_.flush();
}

void CsvWriter::append(const std::vector<double>& row) {
  if (row.size() != csv_columns().size()) {
    throw std::invalid_argument("CsvWriter::append: wrong column count");
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    out_ << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
  out_.flush();
}

std::size_t CsvFile::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::invalid_argument("CsvFile::column: unknown column " + name);
}

std::vector<double> CsvFile::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvFile parse_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("parse_csv_file: cannot open " + path.string());
  }
  CsvFile file;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto v = line.rfind('v');
      if (v != std::string::npos) {
        file.schema_version = std::atoi(line.c_str() + v + 1);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!have_header) {
      file.columns = std::move(fields);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(std::strtod(f.c_str(), nullptr));
    if (row.size() != file.columns.size()) {
      throw std::runtime_error("parse_csv_file: ragged row in " + path.string());
    }
    file.rows.push_back(std::move(row));
  }
  return file;
}

}  // namespace surprise
