#include "scca/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "scca/errors.hpp"
#include "scca/linalg.hpp"

namespace scca {

using arma::mat;
using arma::uword;
using arma::vec;

mat ar_covariance(uword p, double rho) {
  if (std::abs(rho) >= 1.0)
    throw std::invalid_argument("ar_covariance: |rho| must be < 1");
  mat out(p, p);
  for (uword i = 0; i < p; ++i)
    for (uword j = 0; j < p; ++j)
      out(i, j) = std::pow(rho, double(i > j ? i - j : j - i));
  return out;
}

mat SimulationSetting::phi_true(int view) const {
  const uword p = view == 1 ? kP1 : kP2;
  if (phi_kind == PhiTrueKind::Identity) return arma::eye(p, p);
  return ar_covariance(p, view == 1 ? 0.4 : 0.2);
}

std::uint64_t canonical_seed(int id) {
  // settings 5 and 6 need a fixed draw of the random columns so that the true
  // second canonical correlation hits the 0.60 target (found by seed search);
  // the rest are deterministic in column 1 and any seed works
  switch (id) {
    case 5: return 10761;
    case 6: return 10761;
    default: return 1;
  }
}

namespace {

// closed-form first canonical correlation for the rank-1 (d=1) settings,
// used to solve the setting-7 scale by bisection
double rank1_rho1(double scale, double q1, double q2) {
  const double s2 = scale * scale;
  return std::sqrt((s2 * q1 / (1.0 + s2 * q1)) * (s2 * q2 / (1.0 + s2 * q2)));
}

}  // namespace

SimulationSetting build_setting(int id, std::uint64_t seed) {
  if (id < 1 || id > 7) throw std::invalid_argument("build_setting: id must be in 1..7");

  SimulationSetting s;
  s.id = id;
  s.seed = seed;
  switch (id) {
    case 1: s.n = 300; s.phi_kind = PhiTrueKind::Ar; s.d_true = 1; break;
    case 2: s.n = 50;  s.phi_kind = PhiTrueKind::Ar; s.d_true = 1; break;
    case 3: s.n = 300; s.phi_kind = PhiTrueKind::Identity; s.d_true = 1; break;
    case 4: s.n = 50;  s.phi_kind = PhiTrueKind::Identity; s.d_true = 1; break;
    case 5: s.n = 300; s.phi_kind = PhiTrueKind::Ar; s.d_true = 10; break;
    case 6: s.n = 50;  s.phi_kind = PhiTrueKind::Ar; s.d_true = 10; break;
    case 7: s.n = 300; s.phi_kind = PhiTrueKind::Ar; s.d_true = 1; break;
  }

  s.a1_true.zeros(SimulationSetting::kP1, s.d_true);
  s.a2_true.zeros(SimulationSetting::kP2, s.d_true);
  s.a1_true(0, 0) = s.a1_true(10, 0) = s.a1_true(20, 0) = 1.0;
  s.a2_true(0, 0) = 1.0;
  s.a2_true(10, 0) = -1.0;

  if (s.d_true > 1) {
    RngStream rng(seed);
    for (mat* a : {&s.a1_true, &s.a2_true}) {
      for (uword k = 1; k < s.d_true; ++k)
        for (uword j = 0; j < a->n_rows; ++j)
          if (rng.uniform() < 0.05) (*a)(j, k) = rng.normal();
    }
  }

  if (id == 7) {
    const vec a1 = s.a1_true.col(0);
    const vec a2 = s.a2_true.col(0);
    const double q1 = arma::as_scalar(a1.t() * arma::inv_sympd(s.phi_true(1)) * a1);
    const double q2 = arma::as_scalar(a2.t() * arma::inv_sympd(s.phi_true(2)) * a2);
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      (rank1_rho1(mid, q1, q2) < 0.49 ? lo : hi) = mid;
    }
    s.scale = 0.5 * (lo + hi);
    s.a1_true *= s.scale;
    s.a2_true *= s.scale;
  }
  return s;
}

DataViews generate(const SimulationSetting& setting, RngStream& rng) {
  const uword n = setting.n, d = setting.d_true;
  const mat z = rng.normal_mat(n, d);
  const mat r1 = chol_with_jitter(setting.phi_true(1));
  const mat r2 = chol_with_jitter(setting.phi_true(2));

  DataViews dv;
  dv.x1 = z * setting.a1_true.t() + rng.normal_mat(n, SimulationSetting::kP1) * r1;
  dv.x2 = z * setting.a2_true.t() + rng.normal_mat(n, SimulationSetting::kP2) * r2;
  dv.standardized = false;
  dv.feature_names_1.reserve(SimulationSetting::kP1);
  dv.feature_names_2.reserve(SimulationSetting::kP2);
  for (uword j = 0; j < SimulationSetting::kP1; ++j)
    dv.feature_names_1.push_back("v1_" + std::to_string(j + 1));
  for (uword j = 0; j < SimulationSetting::kP2; ++j)
    dv.feature_names_2.push_back("v2_" + std::to_string(j + 1));
  return dv;
}

std::vector<CcaTriple> true_cca(const SimulationSetting& setting) {
  const mat sigma = grand_covariance(setting.a1_true, setting.a2_true,
                                     setting.phi_true(1), setting.phi_true(2));
  return canonical_decomposition(sigma, SimulationSetting::kP1, 2);
}

}  // namespace scca
