#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "scca/metrics.hpp"
#include "scca/simulate.hpp"

using namespace scca;
using arma::uword;

TEST_CASE("AR(1) covariance") {
  const arma::mat m = ar_covariance(4, 0.4);
  CHECK(m(0, 0) == doctest::Approx(1.0));
  CHECK(m(0, 1) == doctest::Approx(0.4));
  CHECK(m(0, 3) == doctest::Approx(0.064));
  CHECK(m(2, 1) == doctest::Approx(0.4));
  arma::mat r;
  CHECK(arma::chol(r, ar_covariance(50, 0.9)));
  CHECK_THROWS_AS(ar_covariance(3, 1.0), std::invalid_argument);
}

TEST_CASE("setting construction follows the design table") {
  for (int id = 1; id <= 7; ++id) {
    const SimulationSetting s = build_setting(id, canonical_seed(id));
    CHECK(s.a1_true.n_rows == 100);
    CHECK(s.a2_true.n_rows == 50);
    CHECK(s.a1_true.n_cols == s.d_true);
    // column-1 support: rows 1, 11, 21 in view 1 and 1, 11 in view 2
    CHECK(s.a1_true(0, 0) == doctest::Approx(s.scale));
    CHECK(s.a1_true(10, 0) == doctest::Approx(s.scale));
    CHECK(s.a1_true(20, 0) == doctest::Approx(s.scale));
    CHECK(s.a2_true(0, 0) == doctest::Approx(s.scale));
    CHECK(s.a2_true(10, 0) == doctest::Approx(-s.scale));
    CHECK(arma::abs(s.a1_true.col(0)).eval().elem(arma::uvec{1, 5, 50}).max() == 0.0);
  }
  CHECK(build_setting(1, 1).n == 300);
  CHECK(build_setting(2, 1).n == 50);
  CHECK(build_setting(4, 1).phi_kind == PhiTrueKind::Identity);
  CHECK(build_setting(5, 1).d_true == 10);
  CHECK(build_setting(6, 1).n == 50);
  CHECK(build_setting(7, 1).scale < 1.0);  // attenuated signal
  CHECK_THROWS_AS(build_setting(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_setting(8, 1), std::invalid_argument);
}

TEST_CASE("true canonical correlations per setting") {
  // d = 1 settings: identity-noise designs give rho1 = sqrt(3/4 * 2/3)
  const auto t3 = true_cca(build_setting(3, 1));
  CHECK(t3[0].rho == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(t3[1].rho < 1e-8);

  const auto t1 = true_cca(build_setting(1, 1));
  CHECK(t1[0].rho == doctest::Approx(0.73).epsilon(0.005 / 0.73));
  CHECK(t1[1].rho < 0.005);

  const auto t7 = true_cca(build_setting(7, 1));
  CHECK(t7[0].rho == doctest::Approx(0.49).epsilon(0.005 / 0.49));
}

TEST_CASE("generation is deterministic in the seed") {
  const SimulationSetting s = build_setting(2, canonical_seed(2));
  RngStream r1(5), r2(5), r3(6);
  const DataViews a = generate(s, r1);
  const DataViews b = generate(s, r2);
  const DataViews c = generate(s, r3);
  CHECK(a.x1.n_rows == 50);
  CHECK(a.x1.n_cols == 100);
  CHECK(a.x2.n_cols == 50);
  CHECK(arma::abs(a.x1 - b.x1).max() == 0.0);
  CHECK(arma::abs(a.x2 - b.x2).max() == 0.0);
  CHECK(arma::abs(a.x1 - c.x1).max() > 0.0);
}

TEST_CASE("generated data has the model covariance (law of large numbers)") {
  const SimulationSetting s = build_setting(1, 1);
  const arma::mat sigma = grand_covariance(s.a1_true, s.a2_true,
                                           s.phi_true(1), s.phi_true(2));
  RngStream rng(9);
  arma::mat acc(150, 150, arma::fill::zeros);
  const int reps = 60;
  for (int r = 0; r < reps; ++r) {
    const DataViews dv = generate(s, rng);
    const arma::mat x = arma::join_rows(dv.x1, dv.x2);
    acc += x.t() * x / double(dv.x1.n_rows);
  }
  acc /= double(reps);
  CHECK(arma::abs(acc - sigma).max() < 0.12);
}

TEST_CASE("signal columns correlate across views") {
  const SimulationSetting s = build_setting(1, 1);
  RngStream rng(13);
  const DataViews dv = generate(s, rng);
  // feature 1 of each view shares the latent factor: correlation well above 0
  const arma::vec x = dv.x1.col(0), y = dv.x2.col(0);
  const double c = arma::as_scalar(arma::cor(x, y));
  CHECK(c > 0.25);
  // and irrelevant features do not
  const double c0 = std::abs(arma::as_scalar(arma::cor(dv.x1.col(50), y)));
  CHECK(c0 < 0.2);
}
