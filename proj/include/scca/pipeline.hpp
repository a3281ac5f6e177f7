#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scca/cca.hpp"
#include "scca/gibbs.hpp"
#include "scca/model.hpp"

namespace scca {

// SCCA_LOG={quiet|info|debug}; messages go to stderr.
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

enum class FitModel { Ndfsm, Dfsm, Auto };

struct FitOptions {
  FitModel model = FitModel::Auto;
  ChainConfig config;
  bool standardize_inputs = true;
};

struct FitArtifacts {
  InferenceSummary summary;
  PosteriorDraws draws;          // aligned draws of the reported model
  double p_overshrink_switch;    // NDFSM P(rho1 < 0.2) that drove the switch
  bool switched = false;
};

// Fits the requested model (auto: NDFSM first, DFSM only when the
// overshrinkage switch triggers) on already-loaded views.
FitArtifacts fit_views(DataViews views, const FitOptions& opt);

// Writes out_dir/truth.json and out_dir/repNNN/{x1.csv,x2.csv}; replicate r
// uses data seed `seed + r` while the truth itself is pinned per setting.
void cmd_simulate(int setting_id, int replicates, std::uint64_t seed,
                  const std::string& out_dir, int jobs = 1);

// Reads the two views, fits, writes out_dir/{draws.csv,summary.json,
// diagnostics.json}.
void cmd_fit(const std::string& view1_path, const std::string& view2_path,
             const FitOptions& opt, const std::string& out_dir);

// Aggregates replicate summaries against truth_dir/truth.json into a
// single-row metrics.csv at out_file.
void cmd_evaluate(const std::string& truth_dir,
                  const std::vector<std::string>& fit_dirs,
                  const std::string& out_file);

// ESS and autocorrelations for every column of draws.csv; returns the number
// of warnings emitted (ESS(rho1) < 1000).
int cmd_diagnose(const std::string& draws_path, const std::string& out_file);

}  // namespace scca
