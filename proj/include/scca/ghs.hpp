#pragma once

#include <armadillo>

#include "scca/rng.hpp"

namespace scca {

// Graphical horseshoe state for one view's precision matrix Omega.  omega_inv
// (= Phi) is maintained alongside omega by rank-one block updates so that the
// column sweeps avoid a fresh (p-1)x(p-1) inversion per column.
struct GhsState {
  arma::mat omega;      // p x p precision, symmetric positive definite
  arma::mat omega_inv;  // its inverse, kept consistent after every sweep
  arma::mat alpha_sq;   // local shrinkage variances, off-diagonal, mirrored
  arma::mat nu_aux;     // augmentation for alpha_sq, mirrored
  double beta_sq = 1.0;
  double xi_aux = 1.0;

  arma::uword dim() const { return omega.n_rows; }
};

GhsState ghs_init(arma::uword p);

// One full column-partitioned Gibbs sweep given the sum-of-squares matrix s
// and sample size n.  Stationary distribution of repeated sweeps is the GHS
// posterior with data contribution exp(-tr(S*Omega)/2) * det(Omega)^{n/2}.
void ghs_sweep(GhsState& state, const arma::mat& s, arma::uword n, RngStream& rng);

}  // namespace scca
