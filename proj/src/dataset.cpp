#include "alr/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "alr/errors.hpp"

namespace alr {

Dataset::Dataset(Eigen::MatrixXd x_in, Eigen::VectorXd y_in) : x(std::move(x_in)), y(std::move(y_in)) {
  if (x.rows() < 1 || x.cols() < 1) throw InvalidDataError("dataset needs n >= 1 and d >= 1");
  if (y.size() != x.rows()) throw InvalidDataError("response length does not match covariate rows");
  if (!x.allFinite() || !y.allFinite()) throw InvalidDataError("dataset contains a non-finite entry");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) {
    while (!cur.empty() && (cur.back() == '\r' || cur.back() == ' ')) cur.pop_back();
    std::size_t b = 0;
    while (b < cur.size() && cur[b] == ' ') ++b;
    fields.push_back(cur.substr(b));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidDataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidDataError(path + ": empty file");
  CsvTable t;
  t.header = split_csv_line(line);
  if (t.header.empty()) throw InvalidDataError(path + ": empty header");
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != t.header.size())
      throw InvalidDataError(path + ": row with " + std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(t.header.size()));
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      try {
        std::size_t pos = 0;
        row[j] = std::stod(fields[j], &pos);
        if (pos != fields[j].size()) throw std::invalid_argument(fields[j]);
      } catch (const std::exception&) {
        throw InvalidDataError(path + ": cannot parse value '" + fields[j] + "'");
      }
      if (!std::isfinite(row[j])) throw InvalidDataError(path + ": non-finite value");
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw InvalidDataError(path + ": no data rows");
  return t;
}

int response_column(const std::vector<std::string>& header, const std::string& path) {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == "y") return static_cast<int>(j);
  throw InvalidDataError(path + ": no column named 'y'");
}

}  // namespace

Dataset load_csv(const std::string& path) {
  const CsvTable t = read_table(path);
  const int ycol = response_column(t.header, path);
  const int n = static_cast<int>(t.rows.size());
  const int d = static_cast<int>(t.header.size()) - 1;
  if (d < 1) throw InvalidDataError(path + ": no covariate columns");
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    int c = 0;
    for (int j = 0; j < static_cast<int>(t.header.size()); ++j) {
      if (j == ycol)
        y(i) = t.rows[i][j];
      else
        x(i, c++) = t.rows[i][j];
    }
  }
  return Dataset(std::move(x), std::move(y));
}

std::vector<std::string> csv_covariate_names(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidDataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidDataError(path + ": empty file");
  auto header = split_csv_line(line);
  std::vector<std::string> names;
  for (const auto& h : header)
    if (h != "y") names.push_back(h);
  return names;
}

}  // namespace alr
