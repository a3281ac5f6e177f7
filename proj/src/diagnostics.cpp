#include "scca/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scca/errors.hpp"
#include "scca/linalg.hpp"

namespace scca {

using arma::uword;
using arma::vec;

arma::vec autocorrelation(const TraceSeries& series, uword max_lag) {
  const vec& x = series.values;
  const uword n = x.n_elem;
  if (n < 2 || max_lag >= n / 2)
    throw std::invalid_argument("autocorrelation: max_lag must be < length/2");
  if (!x.is_finite()) throw std::invalid_argument("autocorrelation: non-finite values");
  const double m = arma::mean(x);
  const vec c = x - m;
  const double c0 = arma::dot(c, c) / double(n);
  if (c0 <= 0.0) throw std::invalid_argument("autocorrelation: constant series");
  vec acf(max_lag + 1);
  acf(0) = 1.0;
  for (uword l = 1; l <= max_lag; ++l) {
    double s = 0.0;
    for (uword t = 0; t + l < n; ++t) s += c(t) * c(t + l);
    acf(l) = (s / double(n)) / c0;
  }
  return acf;
}

double effective_sample_size(const TraceSeries& series) {
  const uword n = series.values.n_elem;
  if (n < 10) throw std::invalid_argument("effective_sample_size: need length >= 10");
  const uword max_lag = n / 2 - 1;
  const vec acf = autocorrelation(series, max_lag);

  // Geyer initial monotone positive sequence over pair sums
  double tau = -1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (uword m = 0; 2 * m + 1 <= max_lag; ++m) {
    double g = acf(2 * m) + acf(2 * m + 1);
    if (g <= 0.0) break;
    g = std::min(g, prev);
    prev = g;
    tau += 2.0 * g;
  }
  if (tau < 1e-12) return double(n);  // immediate truncation: clip to N
  return std::clamp(double(n) / tau, 1.0, double(n));
}

double gaussian_loglik(const DataViews& data, const arma::vec& mu_g,
                       const arma::mat& sigma) {
  const uword p = data.p1() + data.p2();
  if (mu_g.n_elem != p || sigma.n_rows != p || sigma.n_cols != p)
    throw std::invalid_argument("gaussian_loglik: dimension mismatch");
  arma::mat r;
  if (!arma::chol(r, arma::symmatu(sigma)))
    throw numerical_error("gaussian_loglik: sigma not positive definite");
  const double logdet = 2.0 * arma::accu(arma::log(r.diag()));
  arma::mat xc(data.n(), p);
  xc.cols(0, data.p1() - 1) = data.x1;
  xc.cols(data.p1(), p - 1) = data.x2;
  xc.each_row() -= mu_g.t();
  const arma::mat half = arma::solve(arma::trimatl(r.t()), xc.t());
  const double quad = arma::accu(arma::square(half));
  constexpr double log2pi = 1.8378770664093454836;
  return -0.5 * (double(data.n()) * (double(p) * log2pi + logdet) + quad);
}

}  // namespace scca
