#pragma once

#include <string>
#include <vector>

#include <armadillo>

#include "json.hpp"

#include "scca/model.hpp"

namespace scca {

// CSV with a single header row; throws io_error with row/column location on
// malformed input.
struct CsvTable {
  std::vector<std::string> header;
  arma::mat values;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const arma::mat& values);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

// Center each column and scale by the sample standard deviation (n-1
// denominator); throws io_error naming any zero-variance column.
void standardize(DataViews& views);

}  // namespace scca
