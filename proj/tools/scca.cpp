// scca — sparse Bayesian CCA command line.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "scca/errors.hpp"
#include "scca/pipeline.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian sparse canonical correlation analysis"};
  app.require_subcommand(1);

  // simulate
  int setting = 1, replicates = 1, jobs = 1;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "Generate synthetic two-view data");
  sim->add_option("--setting", setting, "Simulation setting id (1-7)")->required();
  sim->add_option("--replicates", replicates, "Number of replicate data sets");
  sim->add_option("--seed", sim_seed, "Base data seed (replicate r uses seed+r)");
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--jobs", jobs, "Parallel workers over replicates");

  // fit
  std::string view1, view2, model = "auto", fit_out;
  scca::ChainConfig cfg;
  bool no_standardize = false;
  auto* fit = app.add_subcommand("fit", "Run the Gibbs sampler on two views");
  fit->add_option("--view1", view1, "CSV for view 1")->required();
  fit->add_option("--view2", view2, "CSV for view 2")->required();
  fit->add_option("--model", model, "ndfsm, dfsm, or auto")
      ->check(CLI::IsMember({"ndfsm", "dfsm", "auto"}));
  fit->add_option("--iters", cfg.iters, "Total iterations");
  fit->add_option("--burnin", cfg.burnin, "Burn-in iterations");
  fit->add_option("--thin", cfg.thin, "Thinning interval");
  fit->add_option("--d", cfg.d, "Latent truncation (0 = automatic)");
  fit->add_option("--zeta", cfg.zeta, "Half-Cauchy scale of the column prior");
  fit->add_option("--seed", cfg.seed, "Chain seed");
  fit->add_option("--out", fit_out, "Output directory")->required();
  fit->add_flag("--no-standardize", no_standardize,
                "Use the views as-is (inputs must already be standardized)");

  // evaluate
  std::string truth_dir, metrics_out;
  std::vector<std::string> fit_dirs;
  auto* ev = app.add_subcommand("evaluate", "Aggregate fits against truth");
  ev->add_option("--truth", truth_dir, "Directory containing truth.json")->required();
  ev->add_option("--fits", fit_dirs, "Fit output directories")->required();
  ev->add_option("--out", metrics_out, "metrics.csv path")->required();

  // diagnose
  std::string draws_path, diag_out;
  auto* dg = app.add_subcommand("diagnose", "ESS / autocorrelation report");
  dg->add_option("--draws", draws_path, "draws.csv path")->required();
  dg->add_option("--out", diag_out, "diagnostics JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (sim->parsed()) {
      scca::cmd_simulate(setting, replicates, sim_seed, sim_out, jobs);
    } else if (fit->parsed()) {
      scca::FitOptions opt;
      opt.model = model == "ndfsm" ? scca::FitModel::Ndfsm
                : model == "dfsm"  ? scca::FitModel::Dfsm
                                   : scca::FitModel::Auto;
      opt.config = cfg;
      opt.standardize_inputs = !no_standardize;
      scca::cmd_fit(view1, view2, opt, fit_out);
    } else if (ev->parsed()) {
      scca::cmd_evaluate(truth_dir, fit_dirs, metrics_out);
    } else if (dg->parsed()) {
      scca::cmd_diagnose(draws_path, diag_out);
    }
  } catch (const scca::io_error& e) {
    std::cerr << "E_IO: " << e.what() << "\n";
    return kExitIo;
  } catch (const scca::numerical_error& e) {
    std::cerr << "E_NUMERICAL: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "E_INPUT: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "E_INPUT: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
