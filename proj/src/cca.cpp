#include "scca/cca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scca/errors.hpp"

namespace scca {

using arma::mat;
using arma::uword;
using arma::vec;

mat grand_covariance(const mat& a1, const mat& a2, const mat& phi1, const mat& phi2) {
  const uword p1 = a1.n_rows, p2 = a2.n_rows;
  if (a1.n_cols != a2.n_cols)
    throw std::invalid_argument("grand_covariance: loading column mismatch");
  if (phi1.n_rows != p1 || phi1.n_cols != p1 || phi2.n_rows != p2 || phi2.n_cols != p2)
    throw std::invalid_argument("grand_covariance: specificity dimension mismatch");
  mat sigma(p1 + p2, p1 + p2);
  sigma.submat(0, 0, p1 - 1, p1 - 1) = a1 * a1.t() + phi1;
  sigma.submat(0, p1, p1 - 1, p1 + p2 - 1) = a1 * a2.t();
  sigma.submat(p1, 0, p1 + p2 - 1, p1 - 1) = a2 * a1.t();
  sigma.submat(p1, p1, p1 + p2 - 1, p1 + p2 - 1) = a2 * a2.t() + phi2;
  return arma::symmatu(sigma);
}

mat inv_sqrt_spd(const mat& m) {
  if (!m.is_square()) throw std::invalid_argument("inv_sqrt_spd: matrix must be square");
  vec eigval;
  mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, arma::symmatu(m)))
    throw numerical_error("inv_sqrt_spd: eigendecomposition failed");
  const double emax = eigval.max();
  if (eigval.min() <= 1e-14 * emax)
    throw numerical_error("inv_sqrt_spd: near-singular input, smallest eigenvalue " +
                          std::to_string(eigval.min()));
  return arma::symmatu(eigvec * arma::diagmat(1.0 / arma::sqrt(eigval)) * eigvec.t());
}

std::vector<CcaTriple> canonical_decomposition(const mat& sigma, uword p1,
                                               uword r_max) {
  if (sigma.n_rows != sigma.n_cols || p1 >= sigma.n_rows)
    throw std::invalid_argument("canonical_decomposition: bad dimensions");
  const uword p2 = sigma.n_rows - p1;
  if (r_max < 1 || r_max > std::min(p1, p2))
    throw std::invalid_argument("canonical_decomposition: r_max out of range");

  const mat s11 = sigma.submat(0, 0, p1 - 1, p1 - 1);
  const mat s22 = sigma.submat(p1, p1, p1 + p2 - 1, p1 + p2 - 1);
  const mat s12 = sigma.submat(0, p1, p1 - 1, p1 + p2 - 1);

  const mat k = inv_sqrt_spd(s11) * s12 * inv_sqrt_spd(s22);
  mat l, q;
  vec p;
  if (!arma::svd(l, p, q, k))
    throw numerical_error("canonical_decomposition: SVD failed");

  std::vector<CcaTriple> triples;
  triples.reserve(r_max);
  for (uword r = 0; r < r_max; ++r) {
    CcaTriple t;
    t.rho = p(r);
    t.u = l.col(r);
    t.v = q.col(r);
    t.order = r + 1;
    triples.push_back(std::move(t));
  }
  return triples;
}

PosteriorDraws align_signs(const PosteriorDraws& draws) {
  if (draws.n_kept() == 0) throw std::invalid_argument("align_signs: empty draws");
  const uword p1 = draws.u.n_cols, p2 = draws.v.n_cols;

  // pivot: largest mean absolute loading over the concatenated (u, v) elements;
  // ties broken by lowest (view, index)
  const arma::rowvec mu = arma::mean(arma::abs(draws.u), 0);
  const arma::rowvec mv = arma::mean(arma::abs(draws.v), 0);
  int pivot_view = 1;
  uword pivot_index = 0;
  double best = -1.0;
  for (uword j = 0; j < p1; ++j)
    if (mu(j) > best) { best = mu(j); pivot_view = 1; pivot_index = j; }
  for (uword j = 0; j < p2; ++j)
    if (mv(j) > best) { best = mv(j); pivot_view = 2; pivot_index = j; }

  PosteriorDraws out = draws;
  for (uword i = 0; i < draws.n_kept(); ++i) {
    const double pv = pivot_view == 1 ? draws.u(i, pivot_index) : draws.v(i, pivot_index);
    if (pv < 0.0) {
      out.u.row(i) = -draws.u.row(i);
      out.v.row(i) = -draws.v.row(i);
    }
  }
  out.aligned = true;
  out.pivot_view = pivot_view;
  out.pivot_index = pivot_index;
  return out;
}

double sample_quantile(vec sorted_values, double prob) {
  const uword n = sorted_values.n_elem;
  if (n == 0) throw std::invalid_argument("sample_quantile: empty input");
  if (prob <= 0.0) return sorted_values(0);
  if (prob >= 1.0) return sorted_values(n - 1);
  const double h = prob * double(n - 1);
  const uword lo = uword(std::floor(h));
  const double frac = h - double(lo);
  if (lo + 1 >= n) return sorted_values(n - 1);
  return sorted_values(lo) * (1.0 - frac) + sorted_values(lo + 1) * frac;
}

InferenceSummary summarize(const PosteriorDraws& draws, double ci_level) {
  if (draws.n_kept() == 0) throw std::invalid_argument("summarize: empty draws");
  if (ci_level <= 0.0 || ci_level >= 1.0)
    throw std::invalid_argument("summarize: ci_level must be in (0,1)");
  if (!draws.aligned) throw std::invalid_argument("summarize: draws must be sign-aligned");

  mat rho = draws.rho;
  const double over = rho.max() - 1.0;
  if (over > 1e-8)
    throw numerical_error("summarize: canonical correlation exceeds 1 beyond tolerance");
  rho.clamp(0.0, 1.0);

  InferenceSummary s;
  s.rho_hat = arma::mean(rho, 0).t();
  s.model_used = draws.model;
  s.pivot_view = draws.pivot_view;
  s.pivot_index = draws.pivot_index;

  vec um = arma::mean(draws.u, 0).t();
  vec vm = arma::mean(draws.v, 0).t();
  s.u_hat = um / arma::norm(um);
  s.v_hat = vm / arma::norm(vm);

  const double lo_p = (1.0 - ci_level) / 2.0;
  const double hi_p = 1.0 - lo_p;
  auto interval = [&](const mat& m, vec& lo, vec& hi, std::vector<bool>& sel) {
    lo.set_size(m.n_cols);
    hi.set_size(m.n_cols);
    sel.resize(m.n_cols);
    for (uword j = 0; j < m.n_cols; ++j) {
      vec col = arma::sort(m.col(j));
      lo(j) = sample_quantile(col, lo_p);
      hi(j) = sample_quantile(col, hi_p);
      sel[j] = lo(j) > 0.0 || hi(j) < 0.0;
    }
  };
  interval(draws.u, s.ci_lower_u, s.ci_upper_u, s.selected_u);
  interval(draws.v, s.ci_lower_v, s.ci_upper_v, s.selected_v);

  uword count = 0;
  for (uword i = 0; i < rho.n_rows; ++i)
    if (rho(i, 0) < 0.2) ++count;
  s.p_overshrink = double(count) / double(rho.n_rows);
  return s;
}

InferenceSummary combined_select(const InferenceSummary& ndfsm,
                                 const InferenceSummary& dfsm, double cc_floor,
                                 double prob_floor) {
  (void)cc_floor;  // p_overshrink is computed at that threshold in summarize
  if (ndfsm.p_overshrink > prob_floor) {
    InferenceSummary out = dfsm;
    out.model_used = ModelKind::DFSM;
    return out;
  }
  InferenceSummary out = ndfsm;
  out.model_used = ModelKind::NDFSM;
  return out;
}

}  // namespace scca
