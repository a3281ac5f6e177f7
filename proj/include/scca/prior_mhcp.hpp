#pragma once

#include <armadillo>

#include "scca/rng.hpp"

namespace scca {

// State of the multiplicative half-Cauchy process: increments eta_tilde_j,
// running products eta_sq_k = prod_{j<=k} eta_tilde_j^2, the scale zeta, and
// the inverse-gamma augmentation variables H_j used by the Gibbs conditionals.
struct MhcpState {
  arma::vec eta_tilde;  // eta_tilde(0) == 1 always
  arma::vec eta_sq;     // running products of squared increments
  arma::vec h_aux;      // h_aux(0) unused, kept at 1
  double zeta = 0.5;

  arma::uword dim() const { return eta_tilde.n_elem; }

  // Recompute eta_sq from eta_tilde.
  void refresh_products();
};

// Quantile function of C+(0, scale) at u in (0,1): scale * tan(pi*u/2).
double half_cauchy_quantile(double u, double scale);

double sample_half_cauchy(double scale, RngStream& rng);

// Unconditional prior draw of the process at truncation d.
MhcpState mhcp_prior_draw(arma::uword d, double zeta, RngStream& rng);

// Density of the product of two independent half-Cauchy variables with scales
// a and b; the removable singularity at u = ab is patched with its limit.
double product_half_cauchy_pdf(double u, double a, double b);

// Prior median of eta_k: zeta^{k-1} (k is 1-based).
double mhcp_median(arma::uword k, double zeta);

}  // namespace scca
