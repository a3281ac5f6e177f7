#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "scca/cca.hpp"
#include "scca/linalg.hpp"
#include "scca/rng.hpp"

using namespace scca;
using arma::uword;

namespace {

PosteriorDraws synthetic_draws(const arma::mat& rho, const arma::mat& u,
                               const arma::mat& v) {
  PosteriorDraws d;
  d.rho = rho;
  d.u = u;
  d.v = v;
  d.loglik.zeros(rho.n_rows);
  d.logdet_sigma.zeros(rho.n_rows);
  d.eta_d_sq.ones(rho.n_rows);
  return d;
}

}  // namespace

TEST_CASE("grand covariance block structure") {
  const arma::mat a1(arma::vec{1.0, 0.5});
  const arma::mat a2(arma::vec{2.0});
  arma::mat phi1 = arma::eye(2, 2);
  arma::mat phi2 = 3.0 * arma::eye(1, 1);
  const arma::mat s = grand_covariance(a1, a2, phi1, phi2);
  REQUIRE(s.n_rows == 3);
  CHECK(s(0, 0) == doctest::Approx(2.0));
  CHECK(s(1, 1) == doctest::Approx(1.25));
  CHECK(s(0, 1) == doctest::Approx(0.5));
  CHECK(s(0, 2) == doctest::Approx(2.0));   // cross block A1 A2'
  CHECK(s(1, 2) == doctest::Approx(1.0));
  CHECK(s(2, 2) == doctest::Approx(7.0));
  CHECK(arma::abs(s - s.t()).max() == 0.0);
  CHECK_THROWS_AS(grand_covariance(a1, a2.rows(0, 0), phi1, arma::eye(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("grand covariance matches a Monte Carlo model oracle") {
  RngStream rng(3);
  arma::mat a1 = {{0.8, 0.1}, {0.0, 0.6}, {0.3, 0.3}};
  arma::mat a2 = {{0.5, -0.4}, {0.2, 0.0}};
  arma::mat phi1 = {{1.0, 0.3, 0.0}, {0.3, 1.0, 0.0}, {0.0, 0.0, 0.5}};
  arma::mat phi2 = arma::eye(2, 2);
  const arma::mat sigma = grand_covariance(a1, a2, phi1, phi2);

  const uword n = 400000;
  const arma::mat z = rng.normal_mat(n, 2);
  arma::mat x(n, 5);
  x.cols(0, 2) = z * a1.t() + rng.normal_mat(n, 3) * chol_with_jitter(phi1);
  x.cols(3, 4) = z * a2.t() + rng.normal_mat(n, 2) * chol_with_jitter(phi2);
  const arma::mat emp = x.t() * x / double(n);
  CHECK(arma::abs(emp - sigma).max() < 0.02);
}

TEST_CASE("inverse square root") {
  arma::mat m = {{4.0, 1.0}, {1.0, 3.0}};
  const arma::mat b = inv_sqrt_spd(m);
  CHECK(arma::abs(b * m * b - arma::eye(2, 2)).max() < 1e-12);
  CHECK(arma::abs(b - b.t()).max() < 1e-12);
  arma::mat sing = {{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(inv_sqrt_spd(sing), numerical_error);
}

TEST_CASE("hand-checkable 2x2 decomposition") {
  // Sigma = [[2,1],[1,2]] with p1 = p2 = 1: rho = 1/2, u = v = 1
  arma::mat sigma = {{2.0, 1.0}, {1.0, 2.0}};
  const auto triples = canonical_decomposition(sigma, 1, 1);
  REQUIRE(triples.size() == 1);
  CHECK(triples[0].rho == doctest::Approx(0.5));
  CHECK(std::abs(triples[0].u(0)) == doctest::Approx(1.0));
  CHECK(std::abs(triples[0].v(0)) == doctest::Approx(1.0));
  CHECK(triples[0].order == 1);
}

TEST_CASE("decomposition agrees with the eigenvalue oracle on random SPD") {
  RngStream rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const uword p1 = 3, p2 = 2, p = p1 + p2;
    arma::mat q = rng.normal_mat(p + 2, p);
    arma::mat sigma = q.t() * q / double(p + 2) + 0.2 * arma::eye(p, p);
    const auto triples = canonical_decomposition(sigma, p1, p2);
    REQUIRE(triples.size() == p2);

    // oracle: rho^2 are eigenvalues of S11^-1 S12 S22^-1 S21
    const arma::mat s11 = sigma.submat(0, 0, p1 - 1, p1 - 1);
    const arma::mat s12 = sigma.submat(0, p1, p1 - 1, p - 1);
    const arma::mat s22 = sigma.submat(p1, p1, p - 1, p - 1);
    arma::cx_vec ev = arma::eig_gen(arma::solve(s11, s12) * arma::solve(s22, s12.t()));
    arma::vec rho2 = arma::sort(arma::real(ev), "descend");
    for (uword r = 0; r < p2; ++r) {
      CHECK(triples[r].rho == doctest::Approx(std::sqrt(std::max(0.0, rho2(r))))
                                  .epsilon(1e-3));
      CHECK(triples[r].rho >= 0.0);
      CHECK(triples[r].rho <= 1.0);
    }
    CHECK(triples[0].rho >= triples[1].rho);

    // whitened directions are orthonormal
    arma::mat u(p1, p2), v(p2, p2);
    for (uword r = 0; r < p2; ++r) {
      u.col(r) = triples[r].u;
      v.col(r) = triples[r].v;
    }
    CHECK(arma::abs(u.t() * u - arma::eye(p2, p2)).max() < 1e-8);
    CHECK(arma::abs(v.t() * v - arma::eye(p2, p2)).max() < 1e-8);
  }
}

TEST_CASE("sign alignment pivots on the largest mean loading") {
  arma::mat rho(4, 2, arma::fill::value(0.5));
  arma::mat u = {{0.9, 0.1}, {-0.9, -0.1}, {0.9, 0.1}, {0.9, 0.1}};
  const arma::mat v(arma::vec{0.2, -0.2, 0.2, 0.2});
  PosteriorDraws d = synthetic_draws(rho, u, v);

  const PosteriorDraws al = align_signs(d);
  CHECK(al.aligned);
  CHECK(al.pivot_view == 1);
  CHECK(al.pivot_index == 0);
  CHECK(al.u.col(0).min() > 0.0);            // pivot column all positive
  CHECK(al.v(1, 0) == doctest::Approx(0.2)); // flipped jointly with u

  // idempotence
  const PosteriorDraws al2 = align_signs(al);
  CHECK(arma::abs(al.u - al2.u).max() == 0.0);

  // global negation of the input leaves the aligned output unchanged
  PosteriorDraws neg = d;
  neg.u = -neg.u;
  neg.v = -neg.v;
  const PosteriorDraws al3 = align_signs(neg);
  CHECK(arma::abs(al.u - al3.u).max() < 1e-14);
  CHECK(arma::abs(al.v - al3.v).max() < 1e-14);
}

TEST_CASE("sample quantiles with linear interpolation") {
  arma::vec x = {1.0, 2.0, 3.0, 4.0};
  CHECK(sample_quantile(x, 0.5) == doctest::Approx(2.5));
  CHECK(sample_quantile(x, 0.0) == doctest::Approx(1.0));
  CHECK(sample_quantile(x, 1.0) == doctest::Approx(4.0));
  CHECK(sample_quantile(x, 0.25) == doctest::Approx(1.75));

  RngStream rng(8);
  const arma::vec z = arma::sort(rng.normal_vec(400000));
  CHECK(sample_quantile(z, 0.25) == doctest::Approx(-0.6744898).epsilon(0.01));
  CHECK(sample_quantile(z, 0.75) == doctest::Approx(0.6744898).epsilon(0.01));
}

TEST_CASE("summarize: means, intervals, selection, overshrink probability") {
  arma::mat rho = {{0.10, 0.2}, {0.30, 0.2}, {0.15, 0.2}, {0.50, 0.2}};
  // coordinate 0 clearly positive, coordinate 1 straddles zero
  arma::mat u = {{1.0, 0.1}, {1.2, -0.1}, {0.8, 0.2}, {1.0, -0.2}};
  const arma::mat v(arma::vec{-0.5, -0.5, -0.5, -0.5});
  PosteriorDraws d = align_signs(synthetic_draws(rho, u, v));
  const InferenceSummary s = summarize(d);

  CHECK(s.rho_hat(0) == doctest::Approx(0.2625));
  CHECK(s.rho_hat(1) == doctest::Approx(0.2));
  CHECK(s.p_overshrink == doctest::Approx(0.5));  // 2 of 4 draws below 0.2
  CHECK(s.selected_u[0]);
  CHECK_FALSE(s.selected_u[1]);
  CHECK(s.selected_v[0]);
  CHECK(arma::norm(s.u_hat) == doctest::Approx(1.0));
  CHECK(s.ci_lower_u(0) < s.ci_upper_u(0));

  PosteriorDraws raw = synthetic_draws(rho, u, v);
  CHECK_THROWS_AS(summarize(raw), std::invalid_argument);  // must align first
}

TEST_CASE("combined model selection switch") {
  InferenceSummary nd, df;
  nd.model_used = ModelKind::NDFSM;
  df.model_used = ModelKind::DFSM;

  nd.p_overshrink = 0.7349;
  CHECK(combined_select(nd, df).model_used == ModelKind::DFSM);
  nd.p_overshrink = 0.0;
  CHECK(combined_select(nd, df).model_used == ModelKind::NDFSM);
  nd.p_overshrink = 0.5;  // boundary stays with NDFSM (strict inequality)
  CHECK(combined_select(nd, df).model_used == ModelKind::NDFSM);
}
