#include "scca/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "scca/cca.hpp"
#include "scca/diagnostics.hpp"
#include "scca/errors.hpp"
#include "scca/linalg.hpp"

namespace scca {

using arma::mat;
using arma::uword;
using arma::vec;

void DataViews::validate() const {
  if (x1.n_rows != x2.n_rows)
    throw std::invalid_argument("DataViews: views must share the subject dimension");
  if (x1.n_rows < 2) throw std::invalid_argument("DataViews: need n >= 2");
  if (!x1.is_finite() || !x2.is_finite())
    throw std::invalid_argument("DataViews: non-finite entries");
  if (standardized) {
    for (const mat* x : {&x1, &x2}) {
      const arma::rowvec m = arma::mean(*x, 0);
      const arma::rowvec s = arma::stddev(*x, 0, 0);
      if (arma::abs(m).max() >= 1e-8 || arma::abs(s - 1.0).max() >= 1e-8)
        throw std::invalid_argument("DataViews: standardized flag set on raw data");
    }
  }
}

void ChainConfig::validate() const {
  if (iters <= burnin) throw std::invalid_argument("ChainConfig: iters must exceed burnin");
  if (thin < 1) throw std::invalid_argument("ChainConfig: thin must be >= 1");
  if ((iters - burnin) / thin < 1)
    throw std::invalid_argument("ChainConfig: no draws would be stored");
  if (zeta <= 0.0 || sigma_sq_mu <= 0.0 || ig_shape <= 0.0 || ig_rate <= 0.0)
    throw std::invalid_argument("ChainConfig: scale hyperparameters must be positive");
  if (n_cc < 1) throw std::invalid_argument("ChainConfig: n_cc must be >= 1");
}

mat ChainState::omega(int view) const {
  if (phi_mode == ModelKind::NDFSM) return view == 1 ? ghs1.omega : ghs2.omega;
  return arma::diagmat(1.0 / (view == 1 ? phi_diag1 : phi_diag2));
}

mat ChainState::phi(int view) const {
  if (phi_mode == ModelKind::NDFSM) return view == 1 ? ghs1.omega_inv : ghs2.omega_inv;
  return arma::diagmat(view == 1 ? phi_diag1 : phi_diag2);
}

uword default_truncation(const DataViews& data) {
  return std::min({uword(15), data.n() - 1, data.p1(), data.p2()});
}

double tau_sq_shape(uword p, uword d) { return (double(p) * double(d) + 1.0) / 2.0; }

double eta_tilde_shape(uword d, uword j, uword p1, uword p2) {
  // j is 1-based, 2 <= j <= d
  return (double(d - (j - 1)) * double(p1 + p2) + 1.0) / 2.0;
}

ChainState init_state(const DataViews& data, const ChainConfig& cfg, RngStream& rng) {
  const uword n = data.n(), p1 = data.p1(), p2 = data.p2();
  const uword d = cfg.d > 0 ? cfg.d : default_truncation(data);

  ChainState s;
  s.mu1 = arma::mean(data.x1, 0).t();
  s.mu2 = arma::mean(data.x2, 0).t();
  // spectral start: latent scores from the top principal directions of the
  // concatenated centered views, loadings by least-squares regression on
  // those scores.  A cold random start can need tens of thousands of sweeps
  // to find the shared-signal mode when n << p.
  s.z = rng.normal_mat(n, d);
  mat xc(n, p1 + p2);
  xc.cols(0, p1 - 1) = data.x1;
  xc.cols(p1, p1 + p2 - 1) = data.x2;
  xc.each_row() -= arma::mean(xc, 0);
  mat pc_u, pc_v;
  vec pc_s;
  if (arma::svd_econ(pc_u, pc_s, pc_v, xc) && pc_s.n_elem > 0) {
    const uword k = std::min<uword>(d, pc_s.n_elem);
    s.z.head_cols(k) = std::sqrt(double(n)) * pc_u.head_cols(k);
  }
  const mat coef = arma::solve(arma::symmatu(s.z.t() * s.z), s.z.t() * xc,
                               arma::solve_opts::likely_sympd);
  s.a1 = coef.cols(0, p1 - 1).t();
  s.a2 = coef.cols(p1, p1 + p2 - 1).t();
  s.lambda_sq1.ones(p1, d);
  s.lambda_sq2.ones(p2, d);
  s.c_aux1.ones(p1, d);
  s.c_aux2.ones(p2, d);
  s.mhcp.zeta = cfg.zeta;
  s.mhcp.eta_tilde.ones(d);
  s.mhcp.h_aux.ones(d);
  s.mhcp.refresh_products();
  s.phi_mode = cfg.model;
  if (cfg.model == ModelKind::NDFSM) {
    s.ghs1 = ghs_init(p1);
    s.ghs2 = ghs_init(p2);
  } else {
    s.phi_diag1.ones(p1);
    s.phi_diag2.ones(p2);
  }
  return s;
}

// ---------------------------------------------------------------------------
// step 1: mean vector, factor scores marginalized out
// ---------------------------------------------------------------------------

ConditionalMoments mu_conditional(const ChainState& state, const DataViews& data,
                                  const ChainConfig& cfg) {
  const uword p1 = data.p1(), p2 = data.p2();
  const double n = double(data.n());

  const mat om1 = state.omega(1);
  const mat om2 = state.omega(2);
  const mat w1 = om1 * state.a1;  // p1 x d
  const mat w2 = om2 * state.a2;

  // Woodbury: Sigma^{-1} = Om_g - W (I + A' Om_g A)^{-1} W'
  mat core = arma::eye(state.d(), state.d()) + state.a1.t() * w1 + state.a2.t() * w2;
  core = arma::symmatu(core);
  mat w(p1 + p2, state.d());
  w.rows(0, p1 - 1) = w1;
  w.rows(p1, p1 + p2 - 1) = w2;

  mat sig_inv(p1 + p2, p1 + p2, arma::fill::zeros);
  sig_inv.submat(0, 0, p1 - 1, p1 - 1) = om1;
  sig_inv.submat(p1, p1, p1 + p2 - 1, p1 + p2 - 1) = om2;
  mat core_inv;
  if (!arma::inv_sympd(core_inv, core))
    throw numerical_error("mu_conditional: singular Woodbury core");
  sig_inv -= w * core_inv * w.t();
  sig_inv = arma::symmatu(sig_inv);

  vec xbar(p1 + p2);
  xbar.subvec(0, p1 - 1) = arma::mean(data.x1, 0).t();
  xbar.subvec(p1, p1 + p2 - 1) = arma::mean(data.x2, 0).t();

  ConditionalMoments cm;
  cm.precision = arma::symmatu(n * sig_inv +
                               (1.0 / cfg.sigma_sq_mu) * arma::eye(p1 + p2, p1 + p2));
  cm.linear = n * (sig_inv * xbar);
  return cm;
}

void step_mu(ChainState& state, const DataViews& data, const ChainConfig& cfg,
             RngStream& rng) {
  // Equivalent to mu_conditional, but written without the Woodbury
  // subtraction: with M = n I + Sigma / sigma_sq_mu the conditional is
  // N(n M^{-1} xbar, Sigma M^{-1}).  M has no cancellation and stays well
  // conditioned even when a precision diagonal blows up.
  const uword p1 = data.p1(), p2 = data.p2(), p = p1 + p2;
  const double n = double(data.n());

  mat a_g(p, state.d());
  a_g.rows(0, p1 - 1) = state.a1;
  a_g.rows(p1, p - 1) = state.a2;
  mat sigma = a_g * a_g.t();
  sigma.submat(0, 0, p1 - 1, p1 - 1) += state.phi(1);
  sigma.submat(p1, p1, p - 1, p - 1) += state.phi(2);
  sigma = arma::symmatu(sigma);

  vec xbar(p);
  xbar.subvec(0, p1 - 1) = arma::mean(data.x1, 0).t();
  xbar.subvec(p1, p - 1) = arma::mean(data.x2, 0).t();

  const mat m = n * arma::eye(p, p) + sigma / cfg.sigma_sq_mu;
  const vec mean = n * arma::solve(m, xbar, arma::solve_opts::likely_sympd);
  const mat cov =
      arma::symmatu(arma::solve(m, sigma, arma::solve_opts::likely_sympd));
  const mat r = chol_with_jitter(cov);  // r'r = cov
  const vec mu_g = mean + r.t() * rng.normal_vec(p);
  state.mu1 = mu_g.subvec(0, p1 - 1);
  state.mu2 = mu_g.subvec(p1, p - 1);
}

// ---------------------------------------------------------------------------
// step 2: latent factor scores
// ---------------------------------------------------------------------------

ConditionalMoments z_conditional(const ChainState& state, const DataViews& data,
                                 uword i) {
  const mat om1 = state.omega(1);
  const mat om2 = state.omega(2);
  const mat w1 = om1 * state.a1;
  const mat w2 = om2 * state.a2;

  ConditionalMoments cm;
  cm.precision = arma::symmatu(arma::eye(state.d(), state.d()) +
                               state.a1.t() * w1 + state.a2.t() * w2);
  cm.linear = w1.t() * (data.x1.row(i).t() - state.mu1) +
              w2.t() * (data.x2.row(i).t() - state.mu2);
  return cm;
}

void step_z(ChainState& state, const DataViews& data, RngStream& rng) {
  const uword n = data.n(), d = state.d();
  const mat om1 = state.omega(1);
  const mat om2 = state.omega(2);
  const mat w1 = om1 * state.a1;
  const mat w2 = om2 * state.a2;
  mat prec = arma::symmatu(arma::eye(d, d) + state.a1.t() * w1 + state.a2.t() * w2);

  const mat r = chol_with_jitter(prec);  // r'r = prec
  const mat xc1 = data.x1.each_row() - state.mu1.t();
  const mat xc2 = data.x2.each_row() - state.mu2.t();
  const mat lin = xc1 * w1 + xc2 * w2;  // n x d

  // means: solve prec * m_i = lin_i rowwise
  mat means = arma::solve(arma::trimatl(r.t()), lin.t());
  means = arma::solve(arma::trimatu(r), means);  // d x n
  const mat rinv = arma::inv(arma::trimatu(r));
  state.z = means.t() + rng.normal_mat(n, d) * rinv.t();
}

// ---------------------------------------------------------------------------
// step 3(a): loading matrix rows
// ---------------------------------------------------------------------------

namespace {

// keep heavy-tailed variance draws representable: products such as
// tau^2 eta^2 lambda^2 must not underflow to 0 (their reciprocals enter
// precision matrices).  The bounds are far outside the support the chain
// ever visits in a healthy regime, so they are statistically vacuous.
double clamp_scale(double v) { return std::clamp(v, 1e-100, 1e100); }

// shrinkage prior precision for row j of view m: diag(1 / (tau^2 eta_k^2 lambda_jk^2))
vec row_prior_precision(const ChainState& state, int view, uword j) {
  const mat& lam = view == 1 ? state.lambda_sq1 : state.lambda_sq2;
  const double tau_sq = view == 1 ? state.tau_sq1 : state.tau_sq2;
  return 1.0 / (tau_sq * state.mhcp.eta_sq % lam.row(j).t());
}

// residual x-tilde for feature j given residual matrix resid = X - 1 mu' - Z A'
// (column j of resid still carries its own loading term through the caller).
vec residual_col(const mat& x, const vec& mu, const mat& resid, const mat& om,
                 uword j) {
  const double om_jj = om(j, j);
  const vec t = resid * om.col(j) - om_jj * resid.col(j);
  return (x.col(j) - mu(j)) + t / om_jj;
}

ConditionalMoments a_row_moments(const ChainState& state, const DataViews& data,
                                 int view, uword j, const mat& om, const mat& ztz,
                                 const mat& resid) {
  const mat& x = view == 1 ? data.x1 : data.x2;
  const vec& mu = state.mu(view);
  const double om_jj = om(j, j);
  const vec xt = residual_col(x, mu, resid, om, j);

  ConditionalMoments cm;
  cm.precision = arma::symmatu(om_jj * ztz + arma::diagmat(row_prior_precision(state, view, j)));
  cm.linear = om_jj * (state.z.t() * xt);
  return cm;
}

}  // namespace

ConditionalMoments a_row_conditional(const ChainState& state, const DataViews& data,
                                     int view, uword j) {
  const mat om = state.omega(view);
  const mat ztz = state.z.t() * state.z;
  const mat& x = view == 1 ? data.x1 : data.x2;
  const mat& a = state.a(view);
  const mat resid = x - arma::repmat(state.mu(view).t(), data.n(), 1) - state.z * a.t();
  return a_row_moments(state, data, view, j, om, ztz, resid);
}

void step_a_row(ChainState& state, const DataViews& data, int view, uword j,
                RngStream& rng) {
  const ConditionalMoments cm = a_row_conditional(state, data, view, j);
  const vec row = mvn_from_precision(cm.precision, cm.linear, rng);
  (view == 1 ? state.a1 : state.a2).row(j) = row.t();
}

void step_a(ChainState& state, const DataViews& data, RngStream& rng) {
  const mat ztz = state.z.t() * state.z;
  for (int view : {1, 2}) {
    const mat om = state.omega(view);
    const mat& x = view == 1 ? data.x1 : data.x2;
    mat& a = view == 1 ? state.a1 : state.a2;
    const vec& mu = state.mu(view);
    mat resid = x - arma::repmat(mu.t(), data.n(), 1) - state.z * a.t();
    for (uword j = 0; j < a.n_rows; ++j) {
      const ConditionalMoments cm = a_row_moments(state, data, view, j, om, ztz, resid);
      const vec row = mvn_from_precision(cm.precision, cm.linear, rng);
      a.row(j) = row.t();
      resid.col(j) = x.col(j) - mu(j) - state.z * row;
    }
  }
}

// ---------------------------------------------------------------------------
// steps 3(b)-3(e): shrinkage and augmentation variables
// ---------------------------------------------------------------------------

void step_shrinkage(ChainState& state, RngStream& rng) {
  const uword d = state.d();
  const uword p1 = state.a1.n_rows, p2 = state.a2.n_rows;

  // 3(b) hyper-local
  for (int view : {1, 2}) {
    const mat& a = state.a(view);
    mat& lam = view == 1 ? state.lambda_sq1 : state.lambda_sq2;
    const mat& c = view == 1 ? state.c_aux1 : state.c_aux2;
    const double tau_sq = view == 1 ? state.tau_sq1 : state.tau_sq2;
    for (uword k = 0; k < d; ++k) {
      const double denom = 2.0 * tau_sq * state.mhcp.eta_sq(k);
      for (uword j = 0; j < a.n_rows; ++j) {
        const double rate = a(j, k) * a(j, k) / denom + 1.0 / c(j, k);
        lam(j, k) = clamp_scale(rng.inv_gamma(1.0, rate));
      }
    }
  }

  // 3(c) view-global
  for (int view : {1, 2}) {
    const mat& a = state.a(view);
    const mat& lam = view == 1 ? state.lambda_sq1 : state.lambda_sq2;
    double& tau_sq = view == 1 ? state.tau_sq1 : state.tau_sq2;
    const double f = view == 1 ? state.f_aux1 : state.f_aux2;
    double rate = 1.0 / f;
    for (uword k = 0; k < d; ++k)
      rate += arma::accu(arma::square(a.col(k)) / lam.col(k)) /
              (2.0 * state.mhcp.eta_sq(k));
    tau_sq = clamp_scale(rng.inv_gamma(tau_sq_shape(a.n_rows, d), rate));
  }

  // 3(d) column-wise increments, sequential over j = 2..d (1-based)
  vec et2 = arma::square(state.mhcp.eta_tilde);
  for (uword j = 1; j < d; ++j) {
    double pre = 1.0;
    for (uword k = 0; k < j; ++k) pre = clamp_scale(pre * et2(k));
    double rate = 1.0 / state.mhcp.h_aux(j);
    for (int view : {1, 2}) {
      const mat& a = state.a(view);
      const mat& lam = view == 1 ? state.lambda_sq1 : state.lambda_sq2;
      const double tau_sq = view == 1 ? state.tau_sq1 : state.tau_sq2;
      double run = pre;
      for (uword k = j; k < d; ++k) {
        if (k > j) run = clamp_scale(run * et2(k));
        rate += arma::accu(arma::square(a.col(k)) / lam.col(k)) /
                (2.0 * tau_sq * run);
      }
    }
    et2(j) = clamp_scale(rng.inv_gamma(eta_tilde_shape(d, j + 1, p1, p2), rate));
  }
  state.mhcp.eta_tilde = arma::sqrt(et2);
  state.mhcp.eta_tilde(0) = 1.0;
  state.mhcp.refresh_products();

  // 3(e) data augmentation
  for (int view : {1, 2}) {
    const mat& lam = view == 1 ? state.lambda_sq1 : state.lambda_sq2;
    mat& c = view == 1 ? state.c_aux1 : state.c_aux2;
    for (uword k = 0; k < d; ++k)
      for (uword j = 0; j < lam.n_rows; ++j)
        c(j, k) = clamp_scale(rng.inv_gamma(1.0, 1.0 + 1.0 / lam(j, k)));
    double& f = view == 1 ? state.f_aux1 : state.f_aux2;
    const double tau_sq = view == 1 ? state.tau_sq1 : state.tau_sq2;
    f = clamp_scale(rng.inv_gamma(1.0, 1.0 + 1.0 / tau_sq));
  }
  const double zeta_sq = state.mhcp.zeta * state.mhcp.zeta;
  for (uword j = 1; j < d; ++j)
    state.mhcp.h_aux(j) =
        clamp_scale(rng.inv_gamma(1.0, 1.0 / zeta_sq + 1.0 / et2(j)));
}

// ---------------------------------------------------------------------------
// step 4: generalized specificity
// ---------------------------------------------------------------------------

void step_phi(ChainState& state, const DataViews& data, const ChainConfig& cfg,
              RngStream& rng) {
  const uword n = data.n();
  for (int view : {1, 2}) {
    const mat& x = view == 1 ? data.x1 : data.x2;
    const mat& a = state.a(view);
    const mat resid = x - arma::repmat(state.mu(view).t(), n, 1) - state.z * a.t();
    if (state.phi_mode == ModelKind::NDFSM) {
      mat s = arma::symmatu(resid.t() * resid);
      // floor the per-feature residual variance at 1e-6 (six orders below the
      // standardized data scale).  Without it the chain can enter a Heywood
      // spiral in the overshrinkage regime: near-zero residuals push omega
      // toward infinity, which in turn forces the loadings to interpolate the
      // data exactly, collapsing the residuals further.
      s.diag() += 1e-6 * double(n);
      ghs_sweep(view == 1 ? state.ghs1 : state.ghs2, s, n, rng);
    } else {
      vec& phi = view == 1 ? state.phi_diag1 : state.phi_diag2;
      for (uword j = 0; j < phi.n_elem; ++j) {
        const double ssq = arma::dot(resid.col(j), resid.col(j));
        phi(j) = rng.inv_gamma(0.5 * n + cfg.ig_shape, cfg.ig_rate + 0.5 * ssq);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// chain driver
// ---------------------------------------------------------------------------

void gibbs_iteration(ChainState& state, const DataViews& data, const ChainConfig& cfg,
                     RngStream& rng) {
  step_mu(state, data, cfg, rng);
  step_z(state, data, rng);
  step_a(state, data, rng);
  step_shrinkage(state, rng);
  step_phi(state, data, cfg, rng);
}

namespace {

double loglik_and_logdet(const DataViews& data, const vec& mu_g, const mat& sigma,
                         double* logdet_out) {
  const mat r = chol_with_jitter(sigma);
  const double logdet = 2.0 * arma::accu(arma::log(r.diag()));
  if (logdet_out) *logdet_out = logdet;
  const uword p = sigma.n_rows, n = data.n();
  mat xc(n, p);
  xc.cols(0, data.p1() - 1) = data.x1;
  xc.cols(data.p1(), p - 1) = data.x2;
  xc.each_row() -= mu_g.t();
  const mat half = arma::solve(arma::trimatl(r.t()), xc.t());  // p x n
  const double quad = arma::accu(arma::square(half));
  constexpr double log2pi = 1.8378770664093454836;
  return -0.5 * (double(n) * (double(p) * log2pi + logdet) + quad);
}

}  // namespace

PosteriorDraws run_chain(const DataViews& data, const ChainConfig& cfg_in) {
  data.validate();
  ChainConfig cfg = cfg_in;
  if (cfg.d == 0) cfg.d = default_truncation(data);
  cfg.validate();
  const uword n_cc = std::min<uword>(cfg.n_cc, std::min(data.p1(), data.p2()));

  RngStream rng(cfg.seed);
  ChainState state = init_state(data, cfg, rng);

  const uword kept = (cfg.iters - cfg.burnin) / cfg.thin;
  PosteriorDraws out;
  out.rho.set_size(kept, n_cc);
  out.u.set_size(kept, data.p1());
  out.v.set_size(kept, data.p2());
  out.loglik.set_size(kept);
  out.logdet_sigma.set_size(kept);
  out.eta_d_sq.set_size(kept);
  out.burnin = cfg.burnin;
  out.thin = cfg.thin;
  out.model = cfg.model;
  out.seed = cfg.seed;

  jitter_counter() = 0;
  uword stored = 0;
  for (uword it = 1; it <= cfg.iters; ++it) {
    const ChainState snapshot = state;
    bool ok = false;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
      try {
        gibbs_iteration(state, data, cfg, rng);
        ok = true;
      } catch (const numerical_error&) {
        state = snapshot;
      }
    }
    if (!ok) ++out.failed_iterations;

    if (it > cfg.burnin && (it - cfg.burnin) % cfg.thin == 0 && stored < kept) {
      try {
        const mat sigma = grand_covariance(state.a1, state.a2, state.phi(1), state.phi(2));
        const auto triples = canonical_decomposition(sigma, data.p1(), n_cc);
        for (uword r = 0; r < n_cc; ++r) out.rho(stored, r) = triples[r].rho;
        out.u.row(stored) = triples[0].u.t();
        out.v.row(stored) = triples[0].v.t();
        vec mu_g = arma::join_cols(state.mu1, state.mu2);
        double logdet = 0.0;
        out.loglik(stored) = loglik_and_logdet(data, mu_g, sigma, &logdet);
        out.logdet_sigma(stored) = logdet;
        out.eta_d_sq(stored) = state.mhcp.eta_sq(state.d() - 1);
        ++stored;
      } catch (const numerical_error&) {
        ++out.failed_iterations;  // a draw that cannot be whitened is skipped
      }
    }
  }
  if (stored < kept) {
    out.rho = out.rho.head_rows(stored);
    out.u = out.u.head_rows(stored);
    out.v = out.v.head_rows(stored);
    out.loglik = out.loglik.head(stored);
    out.logdet_sigma = out.logdet_sigma.head(stored);
    out.eta_d_sq = out.eta_d_sq.head(stored);
    if (stored == 0) throw numerical_error("run_chain: no draws could be stored");
  }
  out.jitter_retries = jitter_counter();

  if (double(out.failed_iterations) > 0.01 * double(cfg.iters))
    throw numerical_error("run_chain: more than 1% of iterations failed numerically");
  return out;
}

}  // namespace scca
