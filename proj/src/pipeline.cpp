#include "scca/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "scca/diagnostics.hpp"
#include "scca/errors.hpp"
#include "scca/io.hpp"
#include "scca/metrics.hpp"
#include "scca/simulate.hpp"

namespace scca {

namespace fs = std::filesystem;
using arma::uword;
using arma::vec;
using nlohmann::json;

namespace {

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("SCCA_LOG");
    if (!env) return 1;
    const std::string s(env);
    if (s == "quiet") return 0;
    if (s == "debug") return 2;
    return 1;
  }();
  return level;
}

std::mutex log_mutex;

json vec_to_json(const vec& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json mat_to_json(const arma::mat& m) {
  json out = json::array();
  for (uword i = 0; i < m.n_rows; ++i) {
    json row = json::array();
    for (uword j = 0; j < m.n_cols; ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

vec vec_from_json(const json& j) {
  vec out(j.size());
  for (uword i = 0; i < out.n_elem; ++i) out(i) = j[i].get<double>();
  return out;
}

std::string rep_dir_name(int r) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "rep%03d", r + 1);
  return buf;
}

}  // namespace

void log_info(const std::string& msg) {
  if (log_level() >= 1) {
    std::lock_guard<std::mutex> lk(log_mutex);
    std::cerr << "[scca] " << msg << "\n";
  }
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) {
    std::lock_guard<std::mutex> lk(log_mutex);
    std::cerr << "[scca:debug] " << msg << "\n";
  }
}

FitArtifacts fit_views(DataViews views, const FitOptions& opt) {
  if (opt.standardize_inputs) standardize(views);
  views.validate();

  FitArtifacts out;
  if (opt.model == FitModel::Dfsm) {
    ChainConfig cfg = opt.config;
    cfg.model = ModelKind::DFSM;
    out.draws = align_signs(run_chain(views, cfg));
    out.summary = summarize(out.draws);
    out.p_overshrink_switch = out.summary.p_overshrink;
    return out;
  }

  ChainConfig cfg = opt.config;
  cfg.model = ModelKind::NDFSM;
  log_info("running NDFSM chain");
  PosteriorDraws nd = align_signs(run_chain(views, cfg));
  InferenceSummary ns = summarize(nd);
  out.p_overshrink_switch = ns.p_overshrink;

  if (opt.model == FitModel::Ndfsm || ns.p_overshrink <= 0.5) {
    out.draws = std::move(nd);
    out.summary = std::move(ns);
    return out;
  }

  log_info("overshrinkage suspected (P(rho1<0.2) = " +
           std::to_string(ns.p_overshrink) + "), rerunning as DFSM");
  cfg.model = ModelKind::DFSM;
  out.draws = align_signs(run_chain(views, cfg));
  out.summary = combined_select(ns, summarize(out.draws));
  out.switched = true;
  return out;
}

void cmd_simulate(int setting_id, int replicates, std::uint64_t seed,
                  const std::string& out_dir, int jobs) {
  if (replicates < 1) throw std::invalid_argument("simulate: replicates must be >= 1");
  if (jobs < 1) throw std::invalid_argument("simulate: jobs must be >= 1");

  const SimulationSetting setting =
      build_setting(setting_id, canonical_seed(setting_id));
  const auto triples = true_cca(setting);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error("cannot create " + out_dir + ": " + ec.message());

  json truth;
  truth["setting"] = setting.id;
  truth["n"] = setting.n;
  truth["d_true"] = setting.d_true;
  truth["phi"] = setting.phi_kind == PhiTrueKind::Ar ? "ar" : "identity";
  truth["scale"] = setting.scale;
  truth["truth_seed"] = setting.seed;
  truth["data_seed"] = seed;
  truth["replicates"] = replicates;
  truth["a1"] = mat_to_json(setting.a1_true);
  truth["a2"] = mat_to_json(setting.a2_true);
  truth["rho"] = json::array({triples[0].rho, triples[1].rho});
  truth["u"] = vec_to_json(triples[0].u);
  truth["v"] = vec_to_json(triples[0].v);
  const auto blocks1 = label_blocks(setting, triples[0].u, 1);
  const auto blocks2 = label_blocks(setting, triples[0].v, 2);
  json jb1 = json::array(), jb2 = json::array();
  for (auto b : blocks1) jb1.push_back(static_cast<int>(b));
  for (auto b : blocks2) jb2.push_back(static_cast<int>(b));
  truth["blocks1"] = jb1;
  truth["blocks2"] = jb2;
  write_json(out_dir + "/truth.json", truth);

  std::vector<std::exception_ptr> errors(replicates);
  auto worker = [&](int first, int step) {
    for (int r = first; r < replicates; r += step) {
      try {
        RngStream rng(seed + std::uint64_t(r));
        const DataViews dv = generate(setting, rng);
        const std::string dir = out_dir + "/" + rep_dir_name(r);
        fs::create_directories(dir);
        write_csv(dir + "/x1.csv", dv.feature_names_1, dv.x1);
        write_csv(dir + "/x2.csv", dv.feature_names_2, dv.x2);
        log_debug("wrote " + dir);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w, jobs);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  log_info("simulated setting " + std::to_string(setting_id) + ", " +
           std::to_string(replicates) + " replicate(s) -> " + out_dir);
}

void cmd_fit(const std::string& view1_path, const std::string& view2_path,
             const FitOptions& opt, const std::string& out_dir) {
  const CsvTable t1 = read_csv(view1_path);
  const CsvTable t2 = read_csv(view2_path);
  if (t1.values.n_rows != t2.values.n_rows)
    throw io_error("views disagree on sample size: " +
                   std::to_string(t1.values.n_rows) + " vs " +
                   std::to_string(t2.values.n_rows) + " rows");

  DataViews views;
  views.x1 = t1.values;
  views.x2 = t2.values;
  views.feature_names_1 = t1.header;
  views.feature_names_2 = t2.header;
  views.standardized = !opt.standardize_inputs;

  const FitArtifacts art = fit_views(std::move(views), opt);
  const PosteriorDraws& dr = art.draws;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error("cannot create " + out_dir + ": " + ec.message());

  // traces
  std::vector<std::string> cols;
  for (uword k = 0; k < dr.rho.n_cols; ++k)
    cols.push_back("rho" + std::to_string(k + 1));
  cols.push_back("loglik");
  cols.push_back("logdet_sigma");
  cols.push_back("eta_d_sq");
  arma::mat traces(dr.n_kept(), cols.size());
  traces.cols(0, dr.rho.n_cols - 1) = dr.rho;
  traces.col(dr.rho.n_cols) = dr.loglik;
  traces.col(dr.rho.n_cols + 1) = dr.logdet_sigma;
  traces.col(dr.rho.n_cols + 2) = dr.eta_d_sq;
  write_csv(out_dir + "/draws.csv", cols, traces);

  const InferenceSummary& s = art.summary;
  json sj;
  sj["model_used"] = to_string(s.model_used);
  sj["p_overshrink"] = art.p_overshrink_switch;
  sj["switched"] = art.switched;
  sj["rho_hat"] = vec_to_json(s.rho_hat);
  sj["u_hat"] = vec_to_json(s.u_hat);
  sj["v_hat"] = vec_to_json(s.v_hat);
  sj["ci_lower_u"] = vec_to_json(s.ci_lower_u);
  sj["ci_upper_u"] = vec_to_json(s.ci_upper_u);
  sj["ci_lower_v"] = vec_to_json(s.ci_lower_v);
  sj["ci_upper_v"] = vec_to_json(s.ci_upper_v);
  sj["selected_u"] = s.selected_u;
  sj["selected_v"] = s.selected_v;
  sj["pivot_view"] = s.pivot_view;
  sj["pivot_index"] = s.pivot_index;
  sj["seed"] = dr.seed;
  sj["burnin"] = dr.burnin;
  sj["thin"] = dr.thin;
  sj["n_kept"] = dr.n_kept();
  sj["jitter_retries"] = dr.jitter_retries;
  sj["failed_iterations"] = dr.failed_iterations;
  write_json(out_dir + "/summary.json", sj);

  json diag;
  for (uword c = 0; c < traces.n_cols; ++c) {
    TraceSeries ts{cols[c], traces.col(c), dr.thin, dr.burnin};
    json entry;
    entry["ess"] = effective_sample_size(ts);
    const uword max_lag = std::min<uword>(20, ts.values.n_elem / 2 - 1);
    entry["acf"] = vec_to_json(autocorrelation(ts, max_lag));
    diag[cols[c]] = entry;
  }
  const double ess_rho1 = diag["rho1"]["ess"].get<double>();
  diag["warning_low_ess_rho1"] = ess_rho1 < 1000.0;
  if (ess_rho1 < 1000.0)
    log_info("warning: ESS(rho1) = " + std::to_string(ess_rho1) + " < 1000");
  write_json(out_dir + "/diagnostics.json", diag);
  log_info("fit written to " + out_dir);
}

void cmd_evaluate(const std::string& truth_dir,
                  const std::vector<std::string>& fit_dirs,
                  const std::string& out_file) {
  if (fit_dirs.empty()) throw std::invalid_argument("evaluate: no fit directories");
  const json truth = read_json(truth_dir + "/truth.json");
  const vec rho_true = vec_from_json(truth.at("rho"));
  const vec u_true = vec_from_json(truth.at("u"));
  const vec v_true = vec_from_json(truth.at("v"));
  std::vector<FeatureBlock> blocks;
  for (const auto& b : truth.at("blocks1"))
    blocks.push_back(static_cast<FeatureBlock>(b.get<int>()));
  for (const auto& b : truth.at("blocks2"))
    blocks.push_back(static_cast<FeatureBlock>(b.get<int>()));

  vec rho1_hat(fit_dirs.size()), rho2_hat(fit_dirs.size());
  std::vector<vec> u_hats, v_hats;
  std::vector<arma::uvec> selected;
  int triggers = 0;
  std::string model_name;
  for (std::size_t r = 0; r < fit_dirs.size(); ++r) {
    const json s = read_json(fit_dirs[r] + "/summary.json");
    const vec rho_hat = vec_from_json(s.at("rho_hat"));
    if (rho_hat.n_elem < 2 || u_true.n_elem != s.at("u_hat").size() ||
        v_true.n_elem != s.at("v_hat").size())
      throw io_error(fit_dirs[r] + "/summary.json: dimensions do not match truth");
    rho1_hat(r) = rho_hat(0);
    rho2_hat(r) = rho_hat(1);
    u_hats.push_back(vec_from_json(s.at("u_hat")));
    v_hats.push_back(vec_from_json(s.at("v_hat")));
    arma::uvec sel(u_true.n_elem + v_true.n_elem);
    uword k = 0;
    for (const auto& b : s.at("selected_u")) sel(k++) = b.get<bool>() ? 1 : 0;
    for (const auto& b : s.at("selected_v")) sel(k++) = b.get<bool>() ? 1 : 0;
    selected.push_back(sel);
    if (s.at("p_overshrink").get<double>() > 0.5) ++triggers;
    const std::string m = s.at("model_used").get<std::string>();
    if (model_name.empty())
      model_name = m;
    else if (model_name != m)
      model_name = "mixed";
  }

  const arma::vec3 sel_rates = selection_rates(selected, blocks);
  arma::mat row(1, 12);
  row(0, 0) = truth.at("setting").get<int>();
  row(0, 2) = rmse(rho1_hat, rho_true(0));
  row(0, 3) = rmse(rho2_hat, rho_true(1));
  row(0, 4) = bias(rho1_hat, rho_true(0));
  row(0, 5) = bias(rho2_hat, rho_true(1));
  row(0, 6) = rmce(u_hats, u_true);
  row(0, 7) = rmce(v_hats, v_true);
  row(0, 8) = sel_rates(0);
  row(0, 9) = sel_rates(1);
  row(0, 10) = sel_rates(2);
  row(0, 11) = double(triggers) / double(fit_dirs.size());

  // the model column is textual; emit the file by hand to keep the schema
  std::ofstream out(out_file);
  if (!out) throw io_error("cannot write " + out_file);
  out.precision(17);
  out << "setting,model,rmse_cc1,rmse_cc2,bias_cc1,bias_cc2,rmce_u,rmce_v,"
         "sel_block1,sel_block2,sel_block3,overshrink_rate\n";
  out << int(row(0, 0)) << "," << model_name;
  for (uword c = 2; c < 12; ++c) out << "," << row(0, c);
  out << "\n";
  if (!out) throw io_error("write failed for " + out_file);
  log_info("metrics written to " + out_file);
}

int cmd_diagnose(const std::string& draws_path, const std::string& out_file) {
  const CsvTable t = read_csv(draws_path);
  if (t.values.n_rows < 10)
    throw io_error(draws_path + ": too few draws for diagnostics");

  json diag;
  int warnings = 0;
  for (uword c = 0; c < t.values.n_cols; ++c) {
    TraceSeries ts{t.header[c], t.values.col(c), 1, 0};
    json entry;
    const double ess = effective_sample_size(ts);
    entry["ess"] = ess;
    const uword max_lag = std::min<uword>(20, ts.values.n_elem / 2 - 1);
    entry["acf"] = vec_to_json(autocorrelation(ts, max_lag));
    diag[t.header[c]] = entry;
    if (t.header[c] == "rho1" && ess < 1000.0) {
      ++warnings;
      log_info("warning: ESS(rho1) = " + std::to_string(ess) + " < 1000");
    }
  }
  diag["warnings"] = warnings;
  write_json(out_file, diag);
  return warnings;
}

}  // namespace scca
