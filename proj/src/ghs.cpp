#include "scca/ghs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scca/errors.hpp"
#include "scca/linalg.hpp"

namespace scca {

namespace {

// half-Cauchy augmentation draws have no moments; clamp to a statistically
// vacuous range so products of local and global scales cannot underflow to
// zero (which would turn precision entries into Inf).
double clamp_scale(double v) { return std::clamp(v, 1e-100, 1e100); }

}  // namespace

GhsState ghs_init(arma::uword p) {
  if (p < 1) throw std::invalid_argument("ghs_init: p must be >= 1");
  GhsState s;
  s.omega.eye(p, p);
  s.omega_inv.eye(p, p);
  s.alpha_sq.ones(p, p);
  s.nu_aux.ones(p, p);
  s.beta_sq = 1.0;
  s.xi_aux = 1.0;
  return s;
}

void ghs_sweep(GhsState& state, const arma::mat& s, arma::uword n, RngStream& rng) {
  const arma::uword p = state.dim();
  if (s.n_rows != p || s.n_cols != p)
    throw std::invalid_argument("ghs_sweep: s has wrong dimensions");
  if (!is_symmetric_tol(s)) throw std::invalid_argument("ghs_sweep: s must be symmetric");
  if (n < 1) throw std::invalid_argument("ghs_sweep: n must be >= 1");

  if (p == 1) {
    // flat prior on the single diagonal entry: Gamma(n/2 + 1, rate s11/2)
    const double w = rng.gamma(n / 2.0 + 1.0, 2.0 / s(0, 0));
    state.omega(0, 0) = w;
    state.omega_inv(0, 0) = 1.0 / w;
    state.beta_sq = clamp_scale(rng.inv_gamma(0.5, 1.0 / state.xi_aux));
    state.xi_aux = rng.inv_gamma(1.0, 1.0 + 1.0 / state.beta_sq);
    return;
  }

  for (arma::uword i = 0; i < p; ++i) {
    arma::uvec idx(p - 1);  // all columns except i
    for (arma::uword k = 0, t = 0; k < p; ++k)
      if (k != i) idx(t++) = k;

    const arma::vec phi12 = state.omega_inv.submat(idx, arma::uvec{i});
    const double phi22 = state.omega_inv(i, i);
    arma::mat om11_inv =
        state.omega_inv.submat(idx, idx) - (phi12 * phi12.t()) / phi22;
    // the rank-1 downdate cancels catastrophically once omega spans many
    // orders of magnitude; fall back to inverting the block directly
    if (!om11_inv.is_finite() || om11_inv.diag().min() <= 0.0)
      om11_inv = arma::inv_sympd(arma::symmatu(state.omega.submat(idx, idx)));

    const double s22 = s(i, i);
    const arma::vec s12 = s.submat(idx, arma::uvec{i});

    const double gam = rng.gamma(n / 2.0 + 1.0, 2.0 / s22);

    // off-diagonal block: N(-C s12, C), C^{-1} = s22 * Om11^{-1} + diag(1/(a^2 b^2))
    const auto build_cinv = [&](const arma::mat& inv11) {
      arma::mat cinv = s22 * inv11;
      for (arma::uword t = 0; t < idx.n_elem; ++t)
        cinv(t, t) += 1.0 / (state.alpha_sq(idx(t), i) * state.beta_sq);
      return arma::mat(arma::symmatu(cinv));
    };
    arma::vec w;
    try {
      w = mvn_from_precision(build_cinv(om11_inv), -s12, rng);
    } catch (const numerical_error&) {
      // a positive diagonal does not guarantee the downdate stayed positive
      // definite; recompute the block inverse exactly and retry once
      om11_inv = arma::inv_sympd(arma::symmatu(state.omega.submat(idx, idx)));
      w = mvn_from_precision(build_cinv(om11_inv), -s12, rng);
    }

    arma::vec om11w = om11_inv * w;
    double quad = arma::dot(w, om11w);
    if (!(quad >= 0.0) || gam < 1e-3 * quad) {
      // the downdate-based quadratic form cannot guarantee a positive Schur
      // complement when gamma is small; redo it against the exact block
      om11w = arma::solve(arma::symmatu(state.omega.submat(idx, idx)), w,
                          arma::solve_opts::likely_sympd);
      quad = std::max(arma::dot(w, om11w), 0.0);
    }
    const double w22 = gam + quad;

    state.omega.submat(idx, arma::uvec{i}) = w;
    state.omega.submat(arma::uvec{i}, idx) = w.t();
    state.omega(i, i) = w22;

    // block-inverse update keeps omega_inv consistent in O(p^2)
    state.omega_inv.submat(idx, idx) = om11_inv + (om11w * om11w.t()) / gam;
    state.omega_inv.submat(idx, arma::uvec{i}) = -om11w / gam;
    state.omega_inv.submat(arma::uvec{i}, idx) = (-om11w / gam).t();
    state.omega_inv(i, i) = 1.0 / gam;

    // local shrinkage for the pairs touching column i
    for (arma::uword t = 0; t < idx.n_elem; ++t) {
      const arma::uword j = idx(t);
      const double wij = state.omega(j, i);
      const double a2 = clamp_scale(rng.inv_gamma(
          1.0, 1.0 / state.nu_aux(j, i) + wij * wij / (2.0 * state.beta_sq)));
      state.alpha_sq(j, i) = state.alpha_sq(i, j) = a2;
      const double nu = rng.inv_gamma(1.0, 1.0 + 1.0 / a2);
      state.nu_aux(j, i) = state.nu_aux(i, j) = nu;
    }
  }

  // global shrinkage over all p(p-1)/2 pairs
  double rate = 1.0 / state.xi_aux;
  const double npairs = p * (p - 1) / 2.0;
  for (arma::uword i = 0; i < p; ++i)
    for (arma::uword j = i + 1; j < p; ++j)
      rate += state.omega(i, j) * state.omega(i, j) / (2.0 * state.alpha_sq(i, j));
  state.beta_sq = clamp_scale(rng.inv_gamma((npairs + 1.0) / 2.0, rate));
  state.xi_aux = rng.inv_gamma(1.0, 1.0 + 1.0 / state.beta_sq);

  // refresh the inverse from a fresh factorization.  A relative-scale floor
  // on the spectrum caps the condition number near 1e12: the flat diagonal
  // prior lets omega drift arbitrarily close to singular when n < p, which
  // is statistically meaningful (overshrinkage) but numerically fatal.
  state.omega = arma::symmatu(state.omega);
  const double floor_scale = arma::abs(state.omega.diag()).max();
  state.omega.diag() += 1e-12 * floor_scale;
  arma::mat r;
  if (!arma::chol(r, state.omega)) {
    const double scale = floor_scale;
    double ridge = 1e-10 * scale;
    bool repaired = false;
    for (int attempt = 0; attempt < 6 && !repaired; ++attempt, ridge *= 100.0) {
      state.omega.diag() += ridge;
      repaired = arma::chol(r, state.omega);
    }
    if (!repaired)
      throw numerical_error("ghs_sweep: omega lost positive definiteness");
    ++jitter_counter();
  }
  arma::mat rinv;
  if (!arma::inv(rinv, arma::trimatu(r)))
    throw numerical_error("ghs_sweep: failed to invert cholesky factor");
  state.omega_inv = arma::symmatu(rinv * rinv.t());
}

}  // namespace scca
