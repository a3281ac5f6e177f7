#include "scca/metrics.hpp"

#include "scca/cca.hpp"

#include <cmath>
#include <stdexcept>

namespace scca {

using arma::uword;
using arma::vec;

std::vector<FeatureBlock> label_blocks(const SimulationSetting& setting,
                                       const arma::vec& true_u, int view) {
  const arma::mat& a = view == 1 ? setting.a1_true : setting.a2_true;
  if (true_u.n_elem != a.n_rows)
    throw std::invalid_argument("label_blocks: true_u length does not match view");
  // the 0.1 relevance threshold applies to the original-space direction;
  // features can pick up weight there through the specificity structure even
  // with a zero loading
  const arma::mat sig_mm = a * a.t() + setting.phi_true(view);
  const arma::vec w = arma::normalise(inv_sqrt_spd(sig_mm) * true_u);
  std::vector<FeatureBlock> out(a.n_rows, FeatureBlock::Irrelevant);
  for (uword j = 0; j < a.n_rows; ++j) {
    if (a(j, 0) != 0.0)
      out[j] = FeatureBlock::LatentAndCCA;
    else if (std::abs(w(j)) > 0.1)
      out[j] = FeatureBlock::CCAOnly;
  }
  return out;
}

double rmse(const vec& estimates, double truth) {
  if (estimates.empty()) throw std::invalid_argument("rmse: empty estimates");
  return std::sqrt(arma::mean(arma::square(estimates - truth)));
}

double bias(const vec& estimates, double truth) {
  if (estimates.empty()) throw std::invalid_argument("bias: empty estimates");
  return arma::mean(estimates) - truth;
}

double rmce(const std::vector<vec>& estimates, const vec& truth) {
  if (estimates.empty()) throw std::invalid_argument("rmce: empty estimates");
  const vec t = arma::normalise(truth);
  double acc = 0.0;
  for (const vec& e : estimates) {
    if (e.n_elem != t.n_elem)
      throw std::invalid_argument("rmce: direction length mismatch");
    acc += 1.0 - std::abs(arma::dot(arma::normalise(e), t));
  }
  return std::sqrt(acc / double(estimates.size()));
}

arma::vec3 selection_rates(const std::vector<arma::uvec>& selected,
                           const std::vector<FeatureBlock>& blocks) {
  if (selected.empty()) throw std::invalid_argument("selection_rates: no replicates");
  arma::vec3 hits(arma::fill::zeros);
  arma::vec3 counts(arma::fill::zeros);
  for (const arma::uvec& sel : selected) {
    if (sel.n_elem != blocks.size())
      throw std::invalid_argument("selection_rates: selection length mismatch");
    for (uword j = 0; j < sel.n_elem; ++j) {
      const int b = static_cast<int>(blocks[j]) - 1;
      counts(b) += 1.0;
      if (sel(j) != 0) hits(b) += 1.0;
    }
  }
  arma::vec3 out;
  for (int b = 0; b < 3; ++b) out(b) = counts(b) > 0.0 ? hits(b) / counts(b) : 0.0;
  return out;
}

}  // namespace scca
