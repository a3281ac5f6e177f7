#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "scca/ghs.hpp"
#include "scca/linalg.hpp"

using namespace scca;
using arma::uword;

namespace {

// batch-means Monte Carlo standard error of a (possibly autocorrelated) series
double batch_se(const arma::vec& x, uword n_batches = 50) {
  const uword b = x.n_elem / n_batches;
  arma::vec means(n_batches);
  for (uword k = 0; k < n_batches; ++k)
    means(k) = arma::mean(x.subvec(k * b, (k + 1) * b - 1));
  return arma::stddev(means) / std::sqrt(double(n_batches));
}

double log_ig(double x, double shape, double rate) {
  // rate^shape matters: the rates below involve other sampled variables
  return shape * std::log(rate) - (shape + 1.0) * std::log(x) - rate / x;
}

// joint log posterior of the 2x2 graphical horseshoe in transformed coordinates
// x = (w11, w22, w12, log a2, log nu, log b2, log xi), Jacobian included
double ghs2_logpost(const arma::vec& x, const arma::mat& s, double n) {
  const double w11 = x(0), w22 = x(1), w12 = x(2);
  const double a2 = std::exp(x(3)), nu = std::exp(x(4));
  const double b2 = std::exp(x(5)), xi = std::exp(x(6));
  const double det = w11 * w22 - w12 * w12;
  if (w11 <= 0.0 || det <= 0.0) return -arma::datum::inf;
  double lp = 0.5 * n * std::log(det) -
              0.5 * (s(0, 0) * w11 + s(1, 1) * w22 + 2.0 * s(0, 1) * w12);
  lp += -0.5 * std::log(a2 * b2) - w12 * w12 / (2.0 * a2 * b2);
  lp += log_ig(a2, 0.5, 1.0 / nu) + log_ig(nu, 0.5, 1.0);
  lp += log_ig(b2, 0.5, 1.0 / xi) + log_ig(xi, 0.5, 1.0);
  lp += x(3) + x(4) + x(5) + x(6);  // log-scale Jacobians
  return lp;
}

}  // namespace

TEST_CASE("contract checks") {
  RngStream rng(1);
  GhsState st = ghs_init(3);
  CHECK(st.omega.n_rows == 3);
  CHECK(arma::approx_equal(st.omega, arma::eye(3, 3), "absdiff", 0.0));
  CHECK(arma::approx_equal(st.omega_inv, arma::eye(3, 3), "absdiff", 0.0));

  arma::mat bad = arma::randu(3, 3);  // not symmetric
  CHECK_THROWS_AS(ghs_sweep(st, bad, 10, rng), std::invalid_argument);
  arma::mat s = arma::eye(4, 4);  // wrong dimension
  CHECK_THROWS_AS(ghs_sweep(st, s, 10, rng), std::invalid_argument);
  arma::mat ok = arma::eye(3, 3);
  CHECK_THROWS_AS(ghs_sweep(st, ok, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(ghs_init(0), std::invalid_argument);
}

TEST_CASE("1x1 case is the exact Gamma posterior") {
  // p = 1: omega | s, n ~ Gamma(n/2 + 1, rate s/2); n = 10, s = 5 -> mean 2.4
  RngStream rng(42);
  arma::mat s(1, 1);
  s(0, 0) = 5.0;
  GhsState st = ghs_init(1);
  const uword n_draws = 200000;
  arma::vec draws(n_draws);
  for (uword i = 0; i < n_draws; ++i) {
    ghs_sweep(st, s, 10, rng);
    draws(i) = st.omega(0, 0);
  }
  // exact mean 2.4, exact var (n/2+1)/(s/2)^2 = 0.96
  CHECK(arma::mean(draws) == doctest::Approx(2.4).epsilon(0.05 / 2.4));
  CHECK(arma::var(draws) == doctest::Approx(0.96).epsilon(0.03));
  CHECK(st.omega_inv(0, 0) == doctest::Approx(1.0 / st.omega(0, 0)));
}

TEST_CASE("2x2 marginals match a random-walk Metropolis oracle") {
  arma::mat s = {{6.0, 2.5}, {2.5, 4.0}};
  const uword n = 8;

  // gibbs side
  RngStream rng(7);
  GhsState st = ghs_init(2);
  const uword g_draws = 150000, g_burn = 5000;
  arma::mat g(g_draws, 3);
  for (uword i = 0; i < g_burn; ++i) ghs_sweep(st, s, n, rng);
  for (uword i = 0; i < g_draws; ++i) {
    ghs_sweep(st, s, n, rng);
    g(i, 0) = std::tanh(st.omega(0, 0));
    g(i, 1) = std::tanh(st.omega(1, 1));
    g(i, 2) = std::tanh(st.omega(0, 1));
  }

  // independent dense random-walk oracle on the same joint posterior
  RngStream orng(1234);
  arma::vec x = {1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  double lp = ghs2_logpost(x, s, double(n));
  const arma::vec step = {0.25, 0.25, 0.15, 0.8, 1.2, 0.8, 1.2};
  const uword m_draws = 600000, m_burn = 50000;
  arma::mat m(m_draws, 3);
  uword accepted = 0;
  for (uword i = 0; i < m_burn + m_draws; ++i) {
    arma::vec prop = x + step % orng.normal_vec(7);
    const double lp2 = ghs2_logpost(prop, s, double(n));
    if (std::log(orng.uniform()) < lp2 - lp) {
      x = prop;
      lp = lp2;
      ++accepted;
    }
    if (i >= m_burn) {
      m(i - m_burn, 0) = std::tanh(x(0));
      m(i - m_burn, 1) = std::tanh(x(1));
      m(i - m_burn, 2) = std::tanh(x(2));
    }
  }
  CHECK(double(accepted) / double(m_burn + m_draws) > 0.05);

  for (uword c = 0; c < 3; ++c) {
    const double se = std::sqrt(std::pow(batch_se(g.col(c)), 2) +
                                std::pow(batch_se(m.col(c)), 2));
    const double diff = arma::mean(g.col(c)) - arma::mean(m.col(c));
    INFO("column ", c, " diff ", diff, " se ", se);
    CHECK(std::abs(diff) < 3.0 * se + 1e-4);
  }
}

TEST_CASE("sweeps preserve symmetry, positive definiteness and the inverse") {
  RngStream rng(99);
  const uword p = 6, n = 20;
  arma::mat x = arma::mat(n, p, arma::fill::randn);
  arma::mat s = x.t() * x;
  GhsState st = ghs_init(p);
  for (uword it = 0; it < 5000; ++it) {
    ghs_sweep(st, s, n, rng);
    if (it % 500 == 0) {
      CHECK(arma::abs(st.omega - st.omega.t()).max() == 0.0);
      arma::mat r;
      CHECK(arma::chol(r, st.omega));
      CHECK(arma::abs(st.omega * st.omega_inv - arma::eye(p, p)).max() < 1e-8);
      CHECK(st.beta_sq > 0.0);
      CHECK(st.alpha_sq.min() >= 0.0);
    }
  }
}

TEST_CASE("determinism under a fixed seed") {
  arma::mat s = {{4.0, 1.0, 0.5}, {1.0, 3.0, 0.2}, {0.5, 0.2, 5.0}};
  auto run = [&]() {
    RngStream rng(2024);
    GhsState st = ghs_init(3);
    for (int i = 0; i < 200; ++i) ghs_sweep(st, s, 15, rng);
    return st.omega;
  };
  const arma::mat a = run(), b = run();
  CHECK(arma::abs(a - b).max() == 0.0);
}

TEST_CASE("posterior concentrates near the true precision with much data") {
  // large n: posterior mean of Omega approaches n * S^{-1}
  RngStream rng(31);
  const uword p = 3, n = 4000;
  arma::mat om_true = {{2.0, 0.8, 0.0}, {0.8, 1.5, 0.0}, {0.0, 0.0, 1.0}};
  const arma::mat sig_chol = chol_with_jitter(arma::inv_sympd(om_true));
  arma::mat x = arma::mat(n, p, arma::fill::randn) * sig_chol;
  arma::mat s = x.t() * x;
  GhsState st = ghs_init(p);
  for (int i = 0; i < 500; ++i) ghs_sweep(st, s, n, rng);
  arma::mat acc(p, p, arma::fill::zeros);
  const int keep = 2000;
  for (int i = 0; i < keep; ++i) {
    ghs_sweep(st, s, n, rng);
    acc += st.omega;
  }
  acc /= double(keep);
  CHECK(arma::abs(acc - om_true).max() < 0.2);
}
