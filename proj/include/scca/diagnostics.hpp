#pragma once

#include <string>

#include <armadillo>

#include "scca/model.hpp"

namespace scca {

struct TraceSeries {
  std::string name;
  arma::vec values;  // stored, post-thinning
  arma::uword thin = 1;
  arma::uword burnin = 0;
};

// Biased-normalized sample autocorrelations, lag 0..max_lag.
arma::vec autocorrelation(const TraceSeries& series, arma::uword max_lag);

// Geyer initial-monotone-positive-sequence estimator, clipped to [1, N].
double effective_sample_size(const TraceSeries& series);

// Sum over rows of the stacked views of the MVN log density at (mu_g, sigma).
double gaussian_loglik(const DataViews& data, const arma::vec& mu_g,
                       const arma::mat& sigma);

}  // namespace scca
