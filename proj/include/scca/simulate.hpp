#pragma once

#include <cstdint>
#include <vector>

#include <armadillo>

#include "scca/cca.hpp"
#include "scca/model.hpp"
#include "scca/rng.hpp"

namespace scca {

enum class PhiTrueKind { Ar, Identity };

// Ground-truth parameterization of one simulation setting: p1 = 100, p2 = 50,
// column 1 of the loadings fixed (rows 1,11,21 in view 1; rows 1,11 with signs
// +,- in view 2), columns 2..d sparse standard normal.
struct SimulationSetting {
  int id = 1;
  arma::uword n = 300;
  arma::uword d_true = 1;
  PhiTrueKind phi_kind = PhiTrueKind::Ar;
  double scale = 1.0;
  arma::mat a1_true;  // 100 x d_true
  arma::mat a2_true;  // 50 x d_true
  std::uint64_t seed = 0;

  static constexpr arma::uword kP1 = 100;
  static constexpr arma::uword kP2 = 50;

  arma::mat phi_true(int view) const;
};

// Frozen seed per setting whose true_cca matches the target (rho1, rho2).
std::uint64_t canonical_seed(int id);

SimulationSetting build_setting(int id, std::uint64_t seed);

// AR(1) correlation matrix with entries rho^{|i-j|}.
arma::mat ar_covariance(arma::uword p, double rho);

DataViews generate(const SimulationSetting& setting, RngStream& rng);

// First two canonical triples of the true grand covariance.
std::vector<CcaTriple> true_cca(const SimulationSetting& setting);

}  // namespace scca
