#pragma once

#include <vector>

#include <armadillo>

#include "scca/simulate.hpp"

namespace scca {

// Feature-block labels used in the selection tables: block 1 holds features
// that load on the shared factor driving the first canonical pair, block 2
// holds features with nonzero canonical weight but no column-1 loading,
// block 3 everything else.
enum class FeatureBlock { LatentAndCCA = 1, CCAOnly = 2, Irrelevant = 3 };

std::vector<FeatureBlock> label_blocks(const SimulationSetting& setting,
                                       const arma::vec& true_u, int view);

double rmse(const arma::vec& estimates, double truth);
double bias(const arma::vec& estimates, double truth);

// Root mean canonical error: sqrt(mean over replicates of 1 - |u_hat' u|),
// both directions normalized to unit length before comparison.
double rmce(const std::vector<arma::vec>& estimates, const arma::vec& truth);

// Per-block fraction of selected features, averaged over replicates.
// selected[r] is a 0/1 vector per replicate; returns one rate per block 1..3.
arma::vec3 selection_rates(const std::vector<arma::uvec>& selected,
                           const std::vector<FeatureBlock>& blocks);

// One replicate's inference output reduced to what the evaluation needs.
struct ReplicateResult {
  arma::vec rho_hat;       // length n_cc
  arma::vec u_hat;
  arma::vec v_hat;
  arma::uvec selected_u;   // 0/1
  arma::uvec selected_v;
  double p_overshrink = 0.0;
  bool used_dfsm = false;
};

}  // namespace scca
