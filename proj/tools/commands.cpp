#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mlqmc/estimators.hpp"
#include "mlqmc/fem.hpp"
#include "mlqmc/hash.hpp"
#include "mlqmc/oracle.hpp"
#include "mlqmc/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mlqmc::cli {

namespace {

constexpr const char* kVersion = "mlqmc 0.1.0";

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string join(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + num(v[i]);
  return s;
}

fs::path constants_path(const Options& o) {
  return o.constants ? *o.constants : o.out / "constants.json";
}

bool is_poisson(const Options& o) { return o.model == "poisson"; }

// Truncation radius for one tolerance; no-op when truncation is off.
void apply_truncation(EigModel& m, const Options& o, double tol) {
  if (o.truncate) m.set_truncation(truncation_radius(tol, *o.truncate));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

ReferenceValue reference_for(const EigModel& model, const Options& o, const RateConstants& c) {
  if (!is_poisson(o)) return eig_linear_reference(dynamic_cast<const LinearGaussianModel&>(model));
  return eig_poisson_reference(dynamic_cast<const PoissonEigModel&>(model), o.tol_ref, o.ref_runs,
                               c, o.M0, mix64(o.seed ^ hash_tag("reference")), o.threads);
}

void write_reference(const Options& o, const ReferenceValue& ref) {
  CsvFile csv(manifest(o), "value,method,error_bound");
  csv.row({num(ref.value), ref.method, num(ref.error_bound)});
  csv.commit(o.out / "reference.csv");
  announce(o.out / "reference.csv");
}

std::uint64_t run_seed(const Options& o, std::string_view tag, std::size_t t, std::size_t k) {
  return stream_id(tag, {o.seed, t, k});
}

// Copies the data rows of a CSV, skipping its comment lines and header.
std::vector<std::string> data_rows(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::vector<std::string> rows;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      if (header) *header = line;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

}  // namespace

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::size_t v) { return std::to_string(v); }

std::string res_str(Resolution r) { return r.is_exact() ? "exact" : num(r.h()); }

std::vector<std::string> manifest(const Options& o) {
  std::vector<std::string> m;
  m.push_back("command=" + o.command);
  m.push_back("model=" + o.model);
  m.push_back("tol=" + join(o.tol, ';'));
  m.push_back("seed=" + std::to_string(o.seed));
  m.push_back("S=" + num(o.S));
  m.push_back("R=" + num(o.R));
  m.push_back("M0=" + num(o.M0));
  m.push_back("h0=" + (is_poisson(o) ? num(o.h0) : std::string("exact")));
  m.push_back("truncate=" + (o.truncate ? num(o.truncate->q_tilde) + "," + num(o.truncate->p)
                                        : std::string("off")));
  m.push_back("out=" + o.out.string());
  m.push_back("timestamp=" + utc_timestamp());
  m.push_back(std::string("version=") + kVersion);
  return m;
}

CsvFile::CsvFile(std::vector<std::string> header_comments, std::string columns)
    : comments_(std::move(header_comments)), columns_(std::move(columns)) {}

void CsvFile::row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + fields[i];
  rows_.push_back(std::move(line));
}

void CsvFile::comment(const std::string& line) { comments_.push_back(line); }

void CsvFile::commit(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path partial = path;
  partial += ".partial";
  {
    std::ofstream out(partial, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + partial.string());
    for (const auto& c : comments_) out << "# " << c << "\n";
    out << columns_ << "\n";
    for (const auto& r : rows_) out << r << "\n";
    if (!out.flush()) throw std::runtime_error("write failed for " + partial.string());
  }
  fs::rename(partial, path);
}

std::unique_ptr<EigModel> make_model(const Options& o) {
  if (o.model == "linear") return std::make_unique<LinearGaussianModel>();
  if (o.model == "poisson") return std::make_unique<PoissonEigModel>();
  throw std::invalid_argument("unknown model '" + o.model + "'");
}

ScheduleShape schedule_shape(const Options& o) {
  ScheduleShape s;
  s.M0 = o.M0;
  if (is_poisson(o)) {
    s.h0 = o.h0;
    s.m_base = 4.0;
  }
  return s;
}

void write_constants(const fs::path& path, const Options& o, const PilotReport& rep,
                     const RateConstants& c) {
  json j;
  j["model"] = o.model;
  j["seed"] = o.seed;
  j["M0"] = o.M0;
  j["constants"] = {{"eta_w", c.eta_w},   {"eta_s", c.eta_s},     {"gamma", c.gamma},
                    {"epsilon", c.epsilon}, {"a_max", c.a_max},   {"c_w", c.c_w},
                    {"c0_var", c.c0_var}, {"cI_var", c.cI_var},   {"c_h2", c.c_h2},
                    {"cIII_var", c.cIII_var}};
  json fits = json::array();
  for (const auto& f : rep.fits) {
    fits.push_back({{"quantity", f.quantity}, {"rate", f.rate()}, {"coeff", f.coeff()},
                    {"dropped", f.dropped}, {"reliable", f.reliable}, {"S", f.S}});
  }
  j["fits"] = fits;
  j["level_var_N_rate"] = rep.level_var_N_rate;
  j["inner_var_rate"] = rep.inner_var_rate;
  fs::path partial = path;
  partial += ".partial";
  {
    std::ofstream out(partial, std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out.flush()) throw std::runtime_error("write failed for " + partial.string());
  }
  fs::rename(partial, path);
}

RateConstants read_constants(const fs::path& path, const std::string& model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read constants file " + path.string() +
                                    " (run the pilot command first)");
  const json j = json::parse(in);
  if (j.at("model").get<std::string>() != model) {
    throw std::runtime_error("constants file " + path.string() + " is for model " +
                             j.at("model").get<std::string>());
  }
  const json& k = j.at("constants");
  RateConstants c;
  c.eta_w = k.at("eta_w");
  c.eta_s = k.at("eta_s");
  c.gamma = k.at("gamma");
  c.epsilon = k.at("epsilon");
  c.a_max = k.at("a_max");
  c.c_w = k.at("c_w");
  c.c0_var = k.at("c0_var");
  c.cI_var = k.at("cI_var");
  c.c_h2 = k.at("c_h2");
  c.cIII_var = k.at("cIII_var");
  c.validate();
  return c;
}

void write_plan(const fs::path& path, const Options& o, const AllocationPlan& plan,
                const RateConstants& c) {
  CsvFile csv(manifest(o), "level,N,M,h");
  csv.comment("plan_tol=" + num(plan.tol));
  csv.comment("constants=eta_w:" + num(c.eta_w) + ";eta_s:" + num(c.eta_s) + ";gamma:" +
              num(c.gamma) + ";epsilon:" + num(c.epsilon) + ";a_max:" + num(c.a_max) +
              ";c_w:" + num(c.c_w) + ";c0_var:" + num(c.c0_var) + ";cI_var:" + num(c.cI_var) +
              ";c_h2:" + num(c.c_h2) + ";cIII_var:" + num(c.cIII_var));
  csv.comment("predicted_work=" + num(plan.predicted_work));
  csv.comment("predicted_variance=" + num(plan.predicted_variance));
  csv.comment("predicted_bias=" + num(plan.predicted_bias));
  for (std::size_t l = 0; l < plan.schedule.size(); ++l) {
    const auto& lv = plan.schedule[l];
    csv.row({num(l), num(lv.N), num(lv.M), res_str(lv.res)});
  }
  csv.commit(path);
}

LevelSchedule read_plan(const fs::path& path) {
  std::vector<LevelSpec> levels;
  std::string header;
  for (const auto& line : data_rows(path, &header)) {
    const auto f = split(line, ',');
    if (f.size() != 4) throw std::runtime_error("malformed plan row: " + line);
    LevelSpec lv;
    lv.N = std::stoull(f[1]);
    lv.M = std::stoull(f[2]);
    lv.res = f[3] == "exact" ? Resolution::exact() : Resolution::mesh(std::stod(f[3]));
    levels.push_back(lv);
  }
  if (header != "level,N,M,h") throw std::runtime_error("unexpected plan header: " + header);
  if (levels.empty()) throw std::runtime_error("plan " + path.string() + " has no levels");
  return LevelSchedule(std::move(levels));
}

int cmd_pilot(const Options& o) {
  auto model = make_model(o);
  apply_truncation(*model, o, o.tol.front());
  PilotSuiteConfig cfg;
  cfg.S = o.pilot_S;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.quick = o.quick;
  cfg.M0 = o.M0;
  cfg.h0 = o.h0;
  PilotInputs in = run_pilot_suite(*model, cfg);
  in.epsilon = o.epsilon;
  in.a_max = o.a_max;
  const PilotReport rep = assemble(in);
  const RateConstants c = rep.constants();

  CsvFile csv(manifest(o), "quantity,grid_value,observed,fit_slope,fit_coeff,S,seed");
  for (const auto& f : rep.fits) {
    csv.comment("fit " + f.quantity + " slope=" + num(f.rate()) + " dropped=" + num(f.dropped) +
                " reliable=" + (f.reliable ? "yes" : "no"));
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
      csv.row({f.quantity, num(f.grid[i]), num(f.observed[i]), num(f.rate()), num(f.coeff()),
               num(f.S), std::to_string(f.seed)});
    }
    std::cout << f.quantity << ": slope " << num(f.rate()) << "\n";
  }
  fs::create_directories(o.out);
  csv.commit(o.out / "pilot.csv");
  announce(o.out / "pilot.csv");
  write_constants(constants_path(o), o, rep, c);
  announce(constants_path(o));
  return 0;
}

int cmd_allocate(const Options& o) {
  const RateConstants c = read_constants(constants_path(o), o.model);
  const ScheduleShape shape = schedule_shape(o);
  CsvFile sweep(manifest(o), "tol,L,predicted_work,predicted_variance,predicted_bias,exponent,case");
  for (std::size_t t = 0; t < o.tol.size(); ++t) {
    const AllocationPlan plan = allocate(o.tol[t], c, shape);
    const WorkPrediction wp = predict_work(plan, c);
    sweep.row({num(o.tol[t]), num(plan.schedule.L()), num(plan.predicted_work),
               num(plan.predicted_variance), num(plan.predicted_bias), num(wp.exponent),
               std::string(work_case_name(wp.work_case))});
    if (t == 0) {
      const fs::path p = o.plan ? *o.plan : o.out / "plan.csv";
      write_plan(p, o, plan, c);
      announce(p);
    }
  }
  sweep.commit(o.out / "allocation_sweep.csv");
  announce(o.out / "allocation_sweep.csv");
  return 0;
}

int cmd_estimate(const Options& o) {
  auto model = make_model(o);
  apply_truncation(*model, o, o.tol.front());
  const LevelSchedule schedule = read_plan(o.plan ? *o.plan : o.out / "plan.csv");
  RunConfig cfg;
  cfg.S = o.S;
  cfg.R = o.R;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const EstimateReport rep = mldlqmc_estimate(*model, schedule, cfg);

  CsvFile csv(manifest(o), "level,mean,variance,N,M,h");
  csv.comment("work_units=" + num(rep.work_units));
  csv.comment("variance_available=" + std::string(rep.variance_available ? "yes" : "no"));
  csv.comment("bias_hat=" + (rep.bias_hat ? num(*rep.bias_hat) : std::string("na")));
  for (const auto& lv : rep.per_level) {
    csv.row({num(lv.level), num(lv.mean), num(lv.variance_of_mean), num(lv.N), num(lv.M),
             res_str(lv.res)});
  }
  csv.row({"total", num(rep.estimate), num(rep.total_variance), "", "", ""});
  csv.commit(o.out / "estimate.csv");
  std::cout << "estimate " << num(rep.estimate) << "\n";
  announce(o.out / "estimate.csv");
  return 0;
}

int cmd_consistency(const Options& o) {
  auto model = make_model(o);
  const RateConstants c = read_constants(constants_path(o), o.model);
  const ReferenceValue ref = reference_for(*model, o, c);
  write_reference(o, ref);
  const std::size_t repeats = o.repeats ? o.repeats : 100;

  CsvFile csv(manifest(o), "tol,run,estimate,reference,abs_error,pass,work");
  csv.comment("reference=" + num(ref.value) + " method=" + ref.method +
              " error_bound=" + num(ref.error_bound));
  for (std::size_t t = 0; t < o.tol.size(); ++t) {
    const double tol = o.tol[t];
    apply_truncation(*model, o, tol);
    const AllocationPlan plan = allocate(tol, c, schedule_shape(o));
    const double work = work_units(plan.schedule, c.gamma);
    std::vector<double> est(repeats);
    parallel_for_chunks(repeats, o.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        RunConfig cfg;
        cfg.seed = run_seed(o, "consistency", t, k);
        est[k] = mldlqmc_estimate(*model, plan.schedule, cfg).estimate;
      }
    });
    std::size_t passes = 0;
    for (std::size_t k = 0; k < repeats; ++k) {
      const double err = std::abs(est[k] - ref.value);
      passes += err <= tol;
      csv.row({num(tol), num(k), num(est[k]), num(ref.value), num(err), err <= tol ? "1" : "0",
               num(work)});
    }
    std::cout << "tol " << num(tol) << ": L=" << plan.schedule.L() << " " << passes << "/"
              << repeats << " within tol\n";
  }
  csv.commit(o.out / "consistency.csv");
  announce(o.out / "consistency.csv");
  return 0;
}

namespace {

struct DlmcConstants {
  double bias = 0.0;      // inner bias ~ bias / M
  double variance = 0.0;  // per-outer-sample variance
};

// Plain Monte Carlo pilot for the DLMC baseline at resolution res.
DlmcConstants dlmc_pilot(const EigModel& model, Resolution res, std::uint64_t seed) {
  constexpr std::size_t N = 1024, M = 256;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  PointSet x(M, model.inner_dim());
  std::vector<double> y(model.outer_dim()), lg(M), terms(N), bias(N);
  for (std::size_t n = 0; n < N; ++n) {
    for (double& v : y) v = U(rng);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t j = 0; j < x.dim(); ++j) x(m, j) = U(rng);
    model.log_g_block(model.outer_state(y, res), model.inner_block(x, res), M, lg);
    const double top = *std::max_element(lg.begin(), lg.end());
    std::vector<double> g(M);
    for (std::size_t m = 0; m < M; ++m) g[m] = std::exp(lg[m] - top);
    const MeanVar mv = sample_mean_var(g);
    // -log of a sample mean: bias ~ Var[g] / (2 M gbar^2)
    bias[n] = mv.variance / (2.0 * mv.mean * mv.mean);
    terms[n] = model.outer_offset(y) - (top + std::log(mv.mean));
  }
  return {sample_mean_var(bias).mean, sample_mean_var(terms).variance};
}

// Inner bias of rDLQMC, (1/2) E_y[Var_s(inner mean) / gbar^2], on an M grid;
// returns the smallest power of two whose fitted bias is below tol / 2.
std::size_t rdlqmc_inner_size(const EigModel& model, Resolution res, double tol,
                              std::uint64_t seed) {
  constexpr std::size_t N = 64, S = 8;
  const std::vector<double> grid{8, 32, 128, 512};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const DigitalNetGenerator gen(model.inner_dim());
  std::vector<double> bias(grid.size(), 0.0), y(model.outer_dim()), scratch, lm(S);
  for (std::size_t n = 0; n < N; ++n) {
    for (double& v : y) v = U(rng);
    const auto state = model.outer_state(y, res);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto M = static_cast<std::size_t>(grid[g]);
      for (std::size_t s = 0; s < S; ++s) {
        const PointSet x = owen_scramble(gen, M, {seed, stream_id("baselines/rdlqmc", {n, g, s})});
        lm[s] = log_inner_mean(model, state, model.inner_block(x, res), M, scratch);
      }
      const double top = *std::max_element(lm.begin(), lm.end());
      std::vector<double> m(S);
      for (std::size_t s = 0; s < S; ++s) m[s] = std::exp(lm[s] - top);
      const MeanVar mv = sample_mean_var(m);
      bias[g] += 0.5 * mv.variance / (mv.mean * mv.mean) / N;
    }
  }
  const LogLogFit fit = loglog_fit(grid, bias);
  if (!(fit.slope < 0.0)) return 512;
  // coeff M^slope <= tol / 2
  return ceil_pow2(std::pow(tol / (2.0 * fit.coeff()), 1.0 / fit.slope));
}

}  // namespace

int cmd_baselines(const Options& o) {
  auto model = make_model(o);
  const RateConstants c = read_constants(constants_path(o), o.model);
  const ReferenceValue ref = reference_for(*model, o, c);
  write_reference(o, ref);
  const std::size_t repeats = o.repeats ? o.repeats : 5;
  const double ca = c.confidence.c_alpha();
  const double p = c.outer_exponent();

  CsvFile csv(manifest(o), "estimator,tol,work,abs_error");
  csv.comment("reference=" + num(ref.value));
  for (std::size_t t = 0; t < o.tol.size(); ++t) {
    const double tol = o.tol[t];
    apply_truncation(*model, o, tol);
    // Single-level baselines use the mesh whose bias C_w h^eta_w is below tol/4.
    Resolution res = Resolution::exact();
    if (is_poisson(o)) {
      double h = o.h0;
      while (c.c_w * std::pow(h, c.eta_w) > tol / 4) h /= 2;
      res = Resolution::mesh(h);
    }
    const DlmcConstants dc = dlmc_pilot(*model, res, run_seed(o, "baselines/pilot", t, 0));
    const auto dl_M = static_cast<std::size_t>(std::ceil(2.0 * dc.bias / tol));
    const auto dl_N = static_cast<std::size_t>(std::ceil(4.0 * ca * ca * dc.variance / (tol * tol)));
    const std::size_t q_M =
        rdlqmc_inner_size(*model, res, tol, run_seed(o, "baselines/pilot", t, 1));
    const std::size_t q_N = ceil_pow2(std::pow(4.0 * ca * ca * c.c0_var / (tol * tol), 1.0 / p));
    const AllocationPlan plan = allocate(tol, c, schedule_shape(o));

    struct Run {
      std::string name;
      double work;
      std::function<double(std::uint64_t)> estimate;
    };
    const std::vector<Run> runs{
        {"dlmc", work_units(LevelSchedule({{dl_N, std::max<std::size_t>(dl_M, 1), res}}), c.gamma),
         [&](std::uint64_t s) {
           return dlmc_estimate(*model, dl_N, std::max<std::size_t>(dl_M, 1), res, s).estimate;
         }},
        {"rdlqmc", work_units(LevelSchedule({{q_N, q_M, res}}), c.gamma),
         [&](std::uint64_t s) { return rdlqmc_estimate(*model, q_N, q_M, res, 1, 1, s).estimate; }},
        {"mldlqmc", work_units(plan.schedule, c.gamma),
         [&](std::uint64_t s) {
           RunConfig cfg;
           cfg.seed = s;
           return mldlqmc_estimate(*model, plan.schedule, cfg).estimate;
         }},
    };
    for (std::size_t e = 0; e < runs.size(); ++e) {
      std::vector<double> err(repeats);
      parallel_for_chunks(repeats, o.threads, [&](std::size_t b, std::size_t end) {
        for (std::size_t k = b; k < end; ++k) {
          err[k] = std::abs(runs[e].estimate(run_seed(o, "baselines", t * 16 + e, k)) - ref.value);
        }
      });
      for (double v : err) csv.row({runs[e].name, num(tol), num(runs[e].work), num(v)});
      std::cout << runs[e].name << " tol " << num(tol) << ": work " << num(runs[e].work) << "\n";
    }
  }
  csv.commit(o.out / "baselines.csv");
  announce(o.out / "baselines.csv");
  return 0;
}

int cmd_figures_data(const Options& o) {
  const bool poi = is_poisson(o);
  const fs::path dir = o.out / "figures";
  const fs::path pilot = o.out / "pilot.csv";
  if (!fs::exists(pilot)) throw std::runtime_error("missing " + pilot.string() + " (run pilot first)");
  const std::string pilot_cols = "quantity,grid_value,observed,fit_slope,fit_coeff,S,seed";

  // Pilot panels, one per fitted quantity.
  const std::vector<std::pair<std::string, std::string>> panels =
      poi ? std::vector<std::pair<std::string, std::string>>{{"bias", "fig3a"},
                                                             {"inner_variance", "fig3b"},
                                                             {"level_variance_N", "fig3c"},
                                                             {"level_variance_M", "fig3d"},
                                                             {"level_variance_h", "fig3e"},
                                                             {"level0_variance", "fig3f"},
                                                             {"gamma", "fig4c"}}
          : std::vector<std::pair<std::string, std::string>>{{"inner_variance", "fig1a"},
                                                             {"level_variance_N", "fig1b"},
                                                             {"level_variance_M", "fig1c"},
                                                             {"level0_variance", "fig1d"}};
  std::string header;
  const auto rows = data_rows(pilot, &header);
  if (header != pilot_cols) throw std::runtime_error("unexpected pilot.csv header: " + header);
  for (const auto& [quantity, stem] : panels) {
    CsvFile csv(manifest(o), pilot_cols);
    std::size_t n = 0;
    for (const auto& r : rows) {
      if (r.rfind(quantity + ",", 0) == 0) {
        csv.row({r});
        ++n;
      }
    }
    if (n == 0) throw std::runtime_error("pilot.csv has no rows for " + quantity);
    const fs::path p = dir / (stem + "_" + quantity + ".csv");
    csv.commit(p);
    announce(p);
  }

  if (poi) {
    // FEM weak error at the observation points against the closed form.
    const fem::TrigForcing f{{1, 1, 1, 1}};
    CsvFile csv(manifest(o), pilot_cols);
    for (double xi : {0.125, 0.875}) {
      std::vector<double> hs, errs;
      for (int k = 2; k <= 9; ++k) {
        const double h = std::ldexp(1.0, -k);
        hs.push_back(h);
        errs.push_back(std::abs(fem::evaluate(fem::solve(f, h), xi) - fem::exact_solution(f, xi)));
      }
      const RateFit fit = fit_rate("weak_xi_" + num(xi), hs, errs);
      for (std::size_t i = 0; i < hs.size(); ++i) {
        csv.row({fit.quantity, num(hs[i]), num(errs[i]), num(fit.rate()), num(fit.coeff()), "1",
                 "0"});
      }
    }
    csv.commit(dir / "fig4b_weak_error.csv");
    announce(dir / "fig4b_weak_error.csv");
  }

  // L* and work against tol.
  const RateConstants c = read_constants(constants_path(o), o.model);
  CsvFile lw(manifest(o), "tol,L,work,predicted_exponent");
  for (int k = 0; k <= 20; ++k) {
    const double tol = std::pow(10.0, -2.0 - 0.1 * k);
    const AllocationPlan plan = allocate(tol, c, schedule_shape(o));
    lw.row({num(tol), num(plan.schedule.L()), num(plan.predicted_work),
            num(predict_work(plan, c).exponent)});
  }
  const std::string ab = poi ? "fig6ab" : "fig2ab";
  lw.commit(dir / (ab + "_levels_work.csv"));
  announce(dir / (ab + "_levels_work.csv"));

  const fs::path cons = o.out / "consistency.csv";
  if (fs::exists(cons)) {
    CsvFile csv(manifest(o), "tol,run,estimate,reference,abs_error,pass,work");
    for (const auto& r : data_rows(cons)) csv.row({r});
    const std::string stem = poi ? "fig6c" : "fig2c";
    csv.commit(dir / (stem + "_consistency.csv"));
    announce(dir / (stem + "_consistency.csv"));
  } else {
    std::cout << "no consistency.csv in " << o.out.string() << "; skipping the error panel\n";
  }
  return 0;
}

}  // namespace mlqmc::cli
