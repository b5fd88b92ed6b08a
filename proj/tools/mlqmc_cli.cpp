#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mlqmc/kernels.hpp"

using namespace mlqmc::cli;

namespace {

void add_common(CLI::App* sub, Options& o, std::string& truncate) {
  sub->add_option("--model", o.model, "linear or poisson")
      ->check(CLI::IsMember({"linear", "poisson"}))
      ->capture_default_str();
  sub->add_option("--tol", o.tol, "tolerance(s)")->delimiter(',')->capture_default_str();
  sub->add_option("--seed", o.seed, "base seed")->capture_default_str();
  sub->add_option("--s", o.S, "outer randomizations S")->check(CLI::PositiveNumber);
  sub->add_option("--r", o.R, "inner randomizations R at the finest level")
      ->check(CLI::PositiveNumber);
  sub->add_option("--m0", o.M0, "inner samples at level 0 (power of two)")->capture_default_str();
  sub->add_option("--h0", o.h0, "coarsest mesh width (poisson)")->capture_default_str();
  sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--truncate", truncate, "noise truncation as q_tilde,p (default off)");
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--constants", o.constants, "constants file (default OUT/constants.json)");
  sub->add_flag("--quick", o.quick, "smaller pilot grids");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel double-loop randomized QMC estimation of expected information gain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mlqmc 0.1.0");
  Options o;
  std::string truncate;

  auto* pilot = app.add_subcommand("pilot", "fit rates and constants; writes pilot.csv and constants.json");
  add_common(pilot, o, truncate);
  pilot->add_option("--pilot-s", o.pilot_S, "pilot randomizations (default per model)");
  pilot->add_option("--a-max", o.a_max, "fix A_max instead of fitting it")->check(CLI::Range(0.0, 0.4999));
  pilot->add_option("--epsilon", o.epsilon, "QMC slack epsilon")->check(CLI::Range(0.0, 0.99));

  auto* alloc = app.add_subcommand("allocate", "plan levels and samples; writes plan.csv and allocation_sweep.csv");
  add_common(alloc, o, truncate);
  alloc->add_option("--plan", o.plan, "plan output path (default OUT/plan.csv)");

  auto* est = app.add_subcommand("estimate", "run MLDLQMC on a plan; writes estimate.csv");
  add_common(est, o, truncate);
  est->add_option("--plan", o.plan, "plan file (default OUT/plan.csv)");

  auto* cons = app.add_subcommand("consistency", "repeated S=R=1 runs against the reference");
  add_common(cons, o, truncate);
  cons->add_option("--repeats", o.repeats, "runs per tolerance (default 100)");
  cons->add_option("--tol-ref", o.tol_ref, "reference tolerance (poisson)")->capture_default_str();
  cons->add_option("--ref-runs", o.ref_runs, "reference runs (poisson)")->capture_default_str();

  auto* base = app.add_subcommand("baselines", "DLMC, rDLQMC and MLDLQMC work against error");
  add_common(base, o, truncate);
  base->add_option("--repeats", o.repeats, "runs per estimator and tolerance (default 5)");
  base->add_option("--tol-ref", o.tol_ref, "reference tolerance (poisson)")->capture_default_str();
  base->add_option("--ref-runs", o.ref_runs, "reference runs (poisson)")->capture_default_str();

  auto* figs = app.add_subcommand("figures-data", "split outputs into one CSV per figure panel");
  add_common(figs, o, truncate);

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto* sub : app.get_subcommands()) o.command = sub->get_name();
    for (double t : o.tol) {
      if (!(t > 0.0)) throw std::invalid_argument("--tol values must be positive");
    }
    if (!truncate.empty()) {
      const auto comma = truncate.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("--truncate expects q_tilde,p");
      o.truncate = mlqmc::TruncationSpec{std::stod(truncate.substr(0, comma)),
                                         std::stod(truncate.substr(comma + 1))};
    }
    std::cerr << "kernels: " << mlqmc::kernels::isa_name(mlqmc::kernels::active_isa()) << "\n";
    if (o.command == "pilot") return cmd_pilot(o);
    if (o.command == "allocate") return cmd_allocate(o);
    if (o.command == "estimate") return cmd_estimate(o);
    if (o.command == "consistency") return cmd_consistency(o);
    if (o.command == "baselines") return cmd_baselines(o);
    if (o.command == "figures-data") return cmd_figures_data(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
