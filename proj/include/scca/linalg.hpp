#pragma once

#include <armadillo>

#include "scca/errors.hpp"
#include "scca/rng.hpp"

namespace scca {

// Per-thread tally of Cholesky jitter retries, reported in run metadata.
inline arma::uword& jitter_counter() {
  thread_local arma::uword count = 0;
  return count;
}

// Upper-triangular Cholesky factor (R with R'R = m).  On failure, retries with
// an escalating diagonal ridge relative to the matrix scale; throws
// numerical_error once the ridge would visibly distort the factor.
inline arma::mat chol_with_jitter(const arma::mat& m) {
  arma::mat r;
  if (arma::chol(r, m)) return r;
  const double scale = std::max(arma::abs(m.diag()).max(), 1e-300);
  double ridge = 1e-12 * scale;
  for (int attempt = 0; attempt < 6; ++attempt, ridge *= 100.0) {
    arma::mat m2 = m;
    m2.diag() += ridge;
    if (arma::chol(r, m2)) {
      ++jitter_counter();
      return r;
    }
  }
  throw numerical_error("cholesky factorization failed after jitter");
}

// Draws from MVN(prec^{-1} * lin, prec^{-1}) given the precision matrix and
// the linear term of the exponent.  Standard conjugate-update sampler.
inline arma::vec mvn_from_precision(const arma::mat& prec, const arma::vec& lin,
                                    RngStream& rng) {
  const arma::mat r = chol_with_jitter(prec);
  // mean: solve R'R mu = lin
  arma::vec mu = arma::solve(arma::trimatl(r.t()), lin);
  mu = arma::solve(arma::trimatu(r), mu);
  const arma::vec z = rng.normal_vec(lin.n_elem);
  return mu + arma::solve(arma::trimatu(r), z);
}

// Mean of the same conditional, for closed-form oracle checks.
inline arma::vec precision_solve(const arma::mat& prec, const arma::vec& lin) {
  const arma::mat r = chol_with_jitter(prec);
  arma::vec mu = arma::solve(arma::trimatl(r.t()), lin);
  return arma::solve(arma::trimatu(r), mu);
}

inline bool is_symmetric_tol(const arma::mat& m, double tol = 1e-10) {
  if (m.n_rows != m.n_cols) return false;
  const double scale = std::max(1.0, arma::abs(m).max());
  return arma::abs(m - m.t()).max() <= tol * scale;
}

}  // namespace scca
