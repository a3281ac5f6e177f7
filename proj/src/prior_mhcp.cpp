#include "scca/prior_mhcp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scca {

void MhcpState::refresh_products() {
  eta_sq.set_size(eta_tilde.n_elem);
  double prod = 1.0;
  for (arma::uword k = 0; k < eta_tilde.n_elem; ++k) {
    prod *= eta_tilde(k) * eta_tilde(k);
    // a run of small increments can drive the cumulative product to exact
    // zero, which turns downstream precision entries into Inf; keep it in a
    // representable (and statistically vacuous) range
    prod = std::clamp(prod, 1e-100, 1e100);
    eta_sq(k) = prod;
  }
}

double half_cauchy_quantile(double u, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("half_cauchy: scale must be positive");
  if (u <= 0.0 || u >= 1.0) throw std::invalid_argument("half_cauchy: u must be in (0,1)");
  return scale * std::tan(std::numbers::pi * u / 2.0);
}

double sample_half_cauchy(double scale, RngStream& rng) {
  if (scale <= 0.0) throw std::invalid_argument("half_cauchy: scale must be positive");
  double u;
  do {
    u = rng.uniform();
  } while (u <= 0.0 || u >= 1.0);
  return half_cauchy_quantile(u, scale);
}

MhcpState mhcp_prior_draw(arma::uword d, double zeta, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("mhcp_prior_draw: d must be >= 1");
  if (zeta <= 0.0) throw std::invalid_argument("mhcp_prior_draw: zeta must be positive");
  MhcpState s;
  s.zeta = zeta;
  s.eta_tilde.set_size(d);
  s.eta_tilde(0) = 1.0;
  for (arma::uword j = 1; j < d; ++j) s.eta_tilde(j) = sample_half_cauchy(zeta, rng);
  s.h_aux.ones(d);
  s.refresh_products();
  return s;
}

double product_half_cauchy_pdf(double u, double a, double b) {
  if (u <= 0.0 || a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("product_half_cauchy_pdf: arguments must be positive");
  const double pi_sq = std::numbers::pi * std::numbers::pi;
  const double ab = a * b;
  const double diff = u * u - ab * ab;
  if (std::abs(diff) < 1e-10 * ab * ab) return 2.0 / (pi_sq * ab);
  return (2.0 * ab / pi_sq) * std::log(u * u / (ab * ab)) / diff;
}

double mhcp_median(arma::uword k, double zeta) {
  if (k < 1) throw std::invalid_argument("mhcp_median: k must be >= 1");
  if (zeta <= 0.0) throw std::invalid_argument("mhcp_median: zeta must be positive");
  return std::pow(zeta, static_cast<double>(k - 1));
}

}  // namespace scca
