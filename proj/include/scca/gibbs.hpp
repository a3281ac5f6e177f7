#pragma once

#include "scca/model.hpp"
#include "scca/rng.hpp"

namespace scca {

// Full-conditional moments exposed for closed-form oracle tests.  Each pair is
// (precision, linear term): the conditional is MVN(prec^{-1} lin, prec^{-1}).
struct ConditionalMoments {
  arma::mat precision;
  arma::vec linear;
};

ConditionalMoments mu_conditional(const ChainState& state, const DataViews& data,
                                  const ChainConfig& cfg);
ConditionalMoments z_conditional(const ChainState& state, const DataViews& data,
                                 arma::uword i);
ConditionalMoments a_row_conditional(const ChainState& state, const DataViews& data,
                                     int view, arma::uword j);

// Gibbs steps 1-5.  Each mutates the state in place using the injected stream.
void step_mu(ChainState& state, const DataViews& data, const ChainConfig& cfg,
             RngStream& rng);
void step_z(ChainState& state, const DataViews& data, RngStream& rng);
void step_a_row(ChainState& state, const DataViews& data, int view, arma::uword j,
                RngStream& rng);
void step_a(ChainState& state, const DataViews& data, RngStream& rng);
void step_shrinkage(ChainState& state, RngStream& rng);
void step_phi(ChainState& state, const DataViews& data, const ChainConfig& cfg,
              RngStream& rng);

// Inverse-gamma shape constants of steps 3(c) and 3(d).
double tau_sq_shape(arma::uword p, arma::uword d);
double eta_tilde_shape(arma::uword d, arma::uword j, arma::uword p1, arma::uword p2);

// One full scan of steps 1-5.
void gibbs_iteration(ChainState& state, const DataViews& data, const ChainConfig& cfg,
                     RngStream& rng);

arma::uword default_truncation(const DataViews& data);

ChainState init_state(const DataViews& data, const ChainConfig& cfg, RngStream& rng);

// Runs the full sampler: steps 1-5 per iteration, burn-in, thinning, storage
// of the first n_cc canonical correlations, the first-CC direction vectors,
// the marginal Gaussian log-likelihood and log|Sigma|.
PosteriorDraws run_chain(const DataViews& data, const ChainConfig& cfg);

}  // namespace scca
