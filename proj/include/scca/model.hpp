#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <armadillo>

#include "scca/ghs.hpp"
#include "scca/prior_mhcp.hpp"

namespace scca {

enum class ModelKind { NDFSM, DFSM };

inline const char* to_string(ModelKind m) {
  return m == ModelKind::NDFSM ? "NDFSM" : "DFSM";
}

// Two observation matrices sharing the subject dimension.
struct DataViews {
  arma::mat x1;  // n x p1
  arma::mat x2;  // n x p2
  std::vector<std::string> feature_names_1;
  std::vector<std::string> feature_names_2;
  bool standardized = false;

  arma::uword n() const { return x1.n_rows; }
  arma::uword p1() const { return x1.n_cols; }
  arma::uword p2() const { return x2.n_cols; }

  void validate() const;
};

struct ChainConfig {
  arma::uword d = 0;  // 0 = pick default min(15, n-1, p1, p2)
  double zeta = 0.5;
  double sigma_sq_mu = 100.0;
  arma::uword iters = 15000;
  arma::uword burnin = 5000;
  arma::uword thin = 5;
  ModelKind model = ModelKind::NDFSM;
  double ig_shape = 0.1;  // DFSM specific-variance prior
  double ig_rate = 0.1;
  std::uint64_t seed = 1;
  arma::uword n_cc = 2;  // canonical correlations stored per draw

  void validate() const;
};

// Every parameter and augmentation variable of one Gibbs iteration.
struct ChainState {
  arma::vec mu1, mu2;
  arma::mat a1, a2;  // p_m x d loadings
  arma::mat z;       // n x d latent scores
  arma::mat lambda_sq1, lambda_sq2;
  double tau_sq1 = 1.0, tau_sq2 = 1.0;
  MhcpState mhcp;  // shared across views
  arma::mat c_aux1, c_aux2;
  double f_aux1 = 1.0, f_aux2 = 1.0;

  ModelKind phi_mode = ModelKind::NDFSM;
  GhsState ghs1, ghs2;          // NDFSM mode
  arma::vec phi_diag1, phi_diag2;  // DFSM mode

  arma::uword d() const { return a1.n_cols; }

  // Dense precision of view m's specificity matrix (copy in diagonal mode).
  arma::mat omega(int view) const;
  // Dense specificity matrix Phi^{(m)} (copy in diagonal mode).
  arma::mat phi(int view) const;

  const arma::mat& a(int view) const { return view == 1 ? a1 : a2; }
  const arma::vec& mu(int view) const { return view == 1 ? mu1 : mu2; }
};

// Thinned stored samples of the CCA quantities and likelihood traces.
struct PosteriorDraws {
  arma::mat rho;  // kept x n_cc
  arma::mat u;    // kept x p1, first CC direction
  arma::mat v;    // kept x p2
  arma::vec loglik;
  arma::vec logdet_sigma;
  arma::vec eta_d_sq;  // trace of the last column's shrinkage factor

  arma::uword burnin = 0, thin = 1;
  ModelKind model = ModelKind::NDFSM;
  std::uint64_t seed = 0;
  arma::uword jitter_retries = 0;
  arma::uword failed_iterations = 0;

  bool aligned = false;
  int pivot_view = 0;      // 1 or 2 after alignment
  arma::uword pivot_index = 0;

  arma::uword n_kept() const { return rho.n_rows; }
};

}  // namespace scca
