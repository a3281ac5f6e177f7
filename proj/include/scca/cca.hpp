#pragma once

#include <vector>

#include <armadillo>

#include "scca/model.hpp"

namespace scca {

// One canonical correlation with its unit direction vectors (whitened space).
struct CcaTriple {
  double rho = 0.0;
  arma::vec u;  // unit vector, length p1
  arma::vec v;  // unit vector, length p2
  arma::uword order = 1;
};

struct InferenceSummary {
  arma::vec rho_hat;
  arma::vec u_hat, v_hat;
  arma::vec ci_lower_u, ci_upper_u;
  arma::vec ci_lower_v, ci_upper_v;
  std::vector<bool> selected_u, selected_v;
  double p_overshrink = 0.0;  // posterior P(rho_1 < 0.2)
  ModelKind model_used = ModelKind::NDFSM;
  int pivot_view = 0;
  arma::uword pivot_index = 0;
};

// Block matrix [A1 A1' + Phi1, A1 A2'; A2 A1', A2 A2' + Phi2].
arma::mat grand_covariance(const arma::mat& a1, const arma::mat& a2,
                           const arma::mat& phi1, const arma::mat& phi2);

// Symmetric B with B m B = I, via eigendecomposition.
arma::mat inv_sqrt_spd(const arma::mat& m);

// SVD of Sigma11^{-1/2} Sigma12 Sigma22^{-1/2}; triples sorted by rho.
std::vector<CcaTriple> canonical_decomposition(const arma::mat& sigma,
                                               arma::uword p1, arma::uword r_max);

// Joint sign alignment of the first-CC direction draws around the feature with
// the largest mean absolute loading.
PosteriorDraws align_signs(const PosteriorDraws& draws);

InferenceSummary summarize(const PosteriorDraws& draws, double ci_level = 0.5);

// The NDFSM -> DFSM overshrinkage switch.
InferenceSummary combined_select(const InferenceSummary& ndfsm,
                                 const InferenceSummary& dfsm,
                                 double cc_floor = 0.2, double prob_floor = 0.5);

// Equal-tailed sample quantile with linear interpolation.
double sample_quantile(arma::vec sorted_values, double prob);

}  // namespace scca
