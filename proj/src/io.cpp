#include "scca/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "scca/errors.hpp"

namespace scca {

using arma::uword;

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  CsvTable t;
  t.header = split_line(line);
  const uword p = t.header.size();
  if (p == 0) throw io_error(path + ": empty header row");

  std::vector<double> buf;
  uword n = 0;
  for (uword row = 2; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != p)
      throw io_error(path + ": row " + std::to_string(row) + " has " +
                     std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(p));
    for (uword col = 0; col < p; ++col) {
      try {
        std::size_t used = 0;
        const double v = std::stod(fields[col], &used);
        if (used != fields[col].size()) throw std::invalid_argument("trailing");
        buf.push_back(v);
      } catch (const std::exception&) {
        throw io_error(path + ": row " + std::to_string(row) + ", column " +
                       std::to_string(col + 1) + ": cannot parse '" +
                       fields[col] + "' as a number");
      }
    }
    ++n;
  }
  t.values.set_size(n, p);
  for (uword i = 0; i < n; ++i)
    for (uword j = 0; j < p; ++j) t.values(i, j) = buf[i * p + j];
  return t;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const arma::mat& values) {
  if (header.size() != values.n_cols)
    throw std::invalid_argument("write_csv: header/column count mismatch");
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out.precision(17);
  for (uword j = 0; j < header.size(); ++j)
    out << header[j] << (j + 1 < header.size() ? "," : "\n");
  for (uword i = 0; i < values.n_rows; ++i)
    for (uword j = 0; j < values.n_cols; ++j)
      out << values(i, j) << (j + 1 < values.n_cols ? "," : "\n");
  if (!out) throw io_error("write failed for " + path);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw io_error("write failed for " + path);
}

void standardize(DataViews& views) {
  auto one = [](arma::mat& x, const std::vector<std::string>& names,
                const char* view) {
    for (uword j = 0; j < x.n_cols; ++j) {
      const double m = arma::mean(x.col(j));
      const double sd = arma::stddev(x.col(j));  // n-1 denominator
      if (sd <= 0.0 || !std::isfinite(sd)) {
        const std::string name =
            j < names.size() ? names[j] : std::to_string(j + 1);
        throw io_error(std::string("standardize: zero-variance column '") +
                       name + "' in " + view);
      }
      x.col(j) = (x.col(j) - m) / sd;
    }
  };
  one(views.x1, views.feature_names_1, "view 1");
  one(views.x2, views.feature_names_2, "view 2");
  views.standardized = true;
}

}  // namespace scca
