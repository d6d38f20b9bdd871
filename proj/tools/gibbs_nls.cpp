// gibbs-nls: certify | sample | simulate | witten | verify | report

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnls/bounds.hpp"
#include "gnls/config.hpp"
#include "gnls/errors.hpp"
#include "gnls/experiment.hpp"
#include "gnls/io.hpp"
#include "gnls/kernels.hpp"
#include "gnls/svg.hpp"
#include "gnls/verify.hpp"
#include "gnls/witten.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gnls;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = 0;
};

struct ModelFlags {
  std::optional<double> lambda, kappa, r, m, beta, s;
  std::optional<std::string> L;

  void add(CLI::App* app) {
    app->add_option("--lambda", lambda, "focusing coupling");
    app->add_option("--kappa", kappa, "stabiliser coupling");
    app->add_option("--r", r, "stabiliser exponent");
    app->add_option("--m", m, "mass");
    app->add_option("--beta", beta, "inverse temperature");
    app->add_option("--L", L, "circumference (number or e.g. 2pi)");
    app->add_option("--s", s, "noise metric exponent");
  }
  ModelParams apply(ModelParams mp) const {
    if (lambda) mp.lambda = *lambda;
    if (kappa) mp.kappa = *kappa;
    if (r) mp.r = *r;
    if (m) mp.m = *m;
    if (beta) mp.beta = *beta;
    if (s) mp.s = *s;
    if (L) {
      try {
        mp.L = parse_length(json::parse(*L));
      } catch (const json::exception&) {
        mp.L = parse_length(json(*L));
      }
    }
    mp.validate();
    return mp;
  }
};

json load_config(const Globals& g) { return g.config.empty() ? json::object() : load_toml(g.config); }

json section(const json& root, const char* name) { return root.contains(name) ? root.at(name) : json(); }

void ensure_dir(const fs::path& p) {
  if (!p.empty()) fs::create_directories(p);
}

int cmd_certify(const Globals& g, const ModelFlags& mf, const std::optional<double>& alpha,
                const std::optional<double>& gamma, const std::optional<double>& a, const std::optional<double>& eps,
                const std::optional<std::string>& radius) {
  const json root = load_config(g);
  const auto mp = mf.apply(read_model(section(root, "model")));
  auto bo = read_bounds(section(root, "bounds"));
  if (alpha) bo.alpha = *alpha;
  if (gamma) bo.gamma = *gamma;
  if (a) bo.a = *a;
  if (eps) bo.epsilon = *eps;
  if (radius) bo.radius = parse_radius_rule(*radius);
  json out = to_json(certify(mp, bo));
  out["model"] = to_json(mp);
  std::cout << out.dump(2) << '\n';
  if (g.out_dir != ".") {
    ensure_dir(g.out_dir);
    write_json(fs::path(g.out_dir) / "certificate.json", out);
  }
  return 0;
}

int cmd_sample(const Globals& g, const ModelFlags& mf, int modes, int count, int chains, std::string out,
               std::optional<double> step, std::optional<int> burn_in, std::optional<int> thin) {
  const json root = load_config(g);
  const auto mp = mf.apply(read_model(section(root, "model")));
  auto cc = read_chain(section(root, "chain"));
  if (g.seed) cc.seed = *g.seed;
  if (step) cc.step = *step;
  if (burn_in) cc.burn_in = *burn_in;
  if (thin) cc.thin = *thin;
  cc.validate();
  if (modes < 0 || count < 1 || chains < 1) throw ConfigError("need modes >= 0, count >= 1, chains >= 1");
  const int per = (count + chains - 1) / chains;
  const auto runs = sample_chains(mp, modes, cc, per, chains, Exec::parallel);
  std::vector<SpectralField> fields;
  double acc = 0;
  bool mistuned = false;
  for (const auto& r : runs) {
    acc += r.acceptance / static_cast<double>(runs.size());
    mistuned = mistuned || r.mistuned;
    for (const auto& f : r.samples)
      if (fields.size() < static_cast<std::size_t>(count)) fields.push_back(f);
  }
  fs::path path = out.empty() ? fs::path(g.out_dir) / "samples.jsonl" : fs::path(out);
  ensure_dir(path.parent_path());
  write_jsonl(path, fields);
  std::cerr << "wrote " << fields.size() << " samples to " << path.string() << ", acceptance " << acc << '\n';
  if (mistuned) std::cerr << "warning: at least one chain accepted fewer than 5% of proposals\n";
  return 0;
}

int cmd_simulate(const Globals& g, const ModelFlags& mf, std::optional<int> modes, std::optional<long> ensemble,
                 std::optional<std::string> initial, std::string out) {
  const json root = load_config(g);
  const json ex = section(root, "experiment");
  if (!ex.is_null() && ex.contains("kind")) {
    auto cfg = read_experiment(root);
    cfg.model = mf.apply(cfg.model);
    if (g.seed) cfg.sim.seed = *g.seed;
    if (modes) cfg.modes = *modes;
    if (ensemble) cfg.ensemble = static_cast<std::size_t>(*ensemble);
    if (initial) cfg.initial = *initial;
    cfg.out_dir = g.out_dir;
    const auto rep = run_experiment(cfg);
    std::cout << rep.summary.dump(2) << '\n';
    return rep.passed ? 0 : 1;
  }

  // Plain ensemble, wide CSV: t, one column per observable, trajectory id.
  ExperimentConfig cfg = read_experiment(root);
  cfg.model = mf.apply(cfg.model);
  if (g.seed) cfg.sim.seed = *g.seed;
  if (modes) cfg.modes = *modes;
  if (ensemble) cfg.ensemble = static_cast<std::size_t>(*ensemble);
  if (initial) cfg.initial = *initial;
  cfg.sim.validate();
  if (cfg.sim.observables.empty()) cfg.sim.observables = {Observable::parse("l2sq"), Observable::parse("hamiltonian")};
  std::vector<SpectralField> init;
  if (cfg.initial == "point") {
    init = {point_initial(cfg.model, cfg.modes, cfg.point_l2sq)};
  } else if (cfg.initial == "free") {
    init = sample_free_batch(cfg.model, cfg.modes, cfg.sim.seed * 4 + 1, cfg.ensemble, Exec::parallel);
  } else if (cfg.initial == "gibbs") {
    auto cc = cfg.chain;
    cc.seed = cfg.sim.seed * 4 + 1;
    const int per = static_cast<int>((cfg.ensemble + 15) / 16);
    for (const auto& r : sample_chains(cfg.model, cfg.modes, cc, per, 16, Exec::parallel))
      for (const auto& f : r.samples)
        if (init.size() < cfg.ensemble) init.push_back(f);
  } else {
    throw ConfigError("initial must be free, gibbs or point");
  }
  const auto es = simulate_ensemble(init, cfg.model, cfg.sim, cfg.ensemble, Exec::parallel);
  fs::path path = out.empty() ? fs::path(g.out_dir) / "simulate.csv" : fs::path(out);
  ensure_dir(path.parent_path());
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot write " + path.string());
  csv << 't';
  for (const auto& n : es.names) csv << ',' << n;
  csv << ",trajectory\n";
  for (std::size_t j = 0; j < es.trajectories; ++j)
    for (std::size_t i = 0; i < es.t.size(); ++i) {
      csv << format_double(es.t[i]);
      for (std::size_t o = 0; o < es.names.size(); ++o) csv << ',' << format_double(es.at(o, j, i));
      csv << ',' << j << '\n';
    }
  for (const auto& [j, msg] : es.failures) std::cerr << "trajectory " << j << " aborted: " << msg << '\n';
  return es.failures.empty() ? 0 : 1;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad number in list: " + tok);
    }
  }
  return out;
}

int cmd_witten(const Globals& g, const ModelFlags& mf, int modes, std::string samples_path, int count,
               std::string eps_grid) {
  const json root = load_config(g);
  ModelParams base;
  base.L = 2 * std::numbers::pi;
  const auto mp = mf.apply(read_model(section(root, "model"), base));
  const auto wp = witten_params_from_model(mp);

  std::vector<std::vector<cplx>> samples;
  if (!samples_path.empty()) {
    for (const auto& f : read_jsonl(samples_path)) {
      if (f.modes() != modes && modes >= 0) throw ConfigError("sample mode count differs from --modes");
      samples.emplace_back(f.coeffs().begin(), f.coeffs().end());
    }
    if (samples.empty()) throw ConfigError("samples file is empty");
  } else {
    auto cc = read_chain(section(root, "chain"));
    if (g.seed) cc.seed = *g.seed;
    const int chains = 16, per = (count + chains - 1) / chains;
    for (const auto& r : sample_chains(mp, std::max(modes, 0), cc, per, chains, Exec::parallel))
      for (const auto& f : r.samples)
        if (samples.size() < static_cast<std::size_t>(count)) samples.emplace_back(f.coeffs().begin(), f.coeffs().end());
  }

  const auto minima = pencil_minima(samples, wp, Exec::parallel);
  std::size_t worst = 0, rejected = 0;
  for (std::size_t i = 0; i < minima.size(); ++i) {
    if (!std::isfinite(minima[i])) {
      ++rejected;
      continue;
    }
    if (!std::isfinite(minima[worst]) || minima[i] < minima[worst]) worst = i;
  }
  std::vector<double> grid = eps_grid.empty() ? std::vector<double>{} : parse_list(eps_grid);
  if (grid.empty())
    for (int i = 1; i < 100; ++i) grid.push_back(i / 100.0);
  std::optional<WittenBound> best;
  for (double eps : grid) {
    if (!(eps > 0 && eps < 1) || wp.r < 2 / (1 - eps)) continue;
    const auto wb = witten_gap_bound(wp.lambda, wp.kappa, wp.r, eps);
    if (!best || wb.value > best->value) best = wb;
  }
  json worst_sample = json::array();
  for (auto z : samples[worst]) worst_sample.push_back({z.real(), z.imag()});
  json out{{"model", to_json(mp)},
           {"witten_params", {{"lambda", wp.lambda}, {"kappa", wp.kappa}, {"r", wp.r}, {"s", wp.s}}},
           {"samples", samples.size()},
           {"rejected", rejected},
           {"c_hat", minima[worst]},
           {"worst_index", worst},
           {"worst_sample", worst_sample},
           {"formula_bound", best ? to_json(*best) : json(nullptr)}};
  bool ok = true;
  if (best) {
    out["margin"] = minima[worst] - best->value;
    ok = !best->certified || minima[worst] >= best->value;
  }
  std::cout << out.dump(2) << '\n';
  if (g.out_dir != ".") {
    ensure_dir(g.out_dir);
    write_json(fs::path(g.out_dir) / "witten.json", out);
  }
  return ok ? 0 : 1;
}

int cmd_verify(const Globals& g, const std::string& only, double scale) {
  SuiteOptions o;
  if (g.seed) o.seed = *g.seed;
  o.scale = scale;
  if (!(scale > 0)) throw ConfigError("--scale must be positive");
  std::vector<int> ids;
  for (double x : only.empty() ? std::vector<double>{} : parse_list(only)) ids.push_back(static_cast<int>(x));
  for (int id : ids)
    if (id < 1 || id > kCriteria) throw ConfigError("no criterion " + std::to_string(id));
  json all = json::array();
  bool ok = true;
  run_suite(o, ids, [&](const CheckResult& r) {
    std::cout << (r.passed ? "PASS" : "FAIL") << ' ' << r.id << ' ' << r.name << " (" << r.seconds << " s): "
              << r.detail << std::endl;
    all.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
                   {"seconds", r.seconds}, {"data", r.data}});
    ok = ok && r.passed;
  });
  if (g.out_dir != ".") {
    ensure_dir(g.out_dir);
    write_json(fs::path(g.out_dir) / "verify.json",
               {{"schema_version", kSchemaVersion}, {"seed", o.seed}, {"scale", scale}, {"results", all}});
  }
  return ok ? 0 : 1;
}

int cmd_report(const Globals& g, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw ConfigError("report needs at least one CSV");
  ensure_dir(g.out_dir);
  for (const auto& in : inputs) {
    const auto rows = read_long_csv(in);
    if (rows.empty()) continue;
    const std::string id = rows.front().experiment;
    std::map<std::string, PlotSeries> dev, cert;
    for (const auto& r : rows) {
      if (r.trajectory == "mean" && r.observable.rfind("deviation:", 0) == 0) {
        auto& s = dev[r.observable];
        s.label = r.observable.substr(10);
        s.x.push_back(r.t);
        s.y.push_back(std::abs(r.value));
      } else if (r.trajectory == "certificate" && r.observable == "neg_log_ratio") {
        auto& s = cert[r.observable];
        s.label = "-log(C_final / C0)";
        s.x.push_back(r.t);
        s.y.push_back(r.value);
      }
    }
    // Reference slopes from the summary next to the CSV, when present.
    std::vector<PlotSeries> series;
    for (auto& [k, s] : dev) series.push_back(s);
    const fs::path summary = fs::path(in).replace_extension(".json");
    if (!series.empty() && fs::exists(summary)) {
      const json j = json::parse(std::ifstream(summary));
      if (j.contains("certificate")) {
        const double t0 = series.front().x.front(), t1 = series.front().x.back();
        double y0 = 0;
        for (const auto& s : series)
          if (!s.y.empty()) y0 = std::max(y0, s.y.front());
        auto ref = [&](const std::string& label, double rate) {
          PlotSeries p{label, {t0, t1}, {y0, y0 * std::exp(-rate * (t1 - t0))}, true};
          series.push_back(p);
        };
        ref("certified rate", j["certificate"]["rate_bound"].get<double>());
        if (!j["certificate"]["witten_rate_bound"].is_null())
          ref("Witten rate", j["certificate"]["witten_rate_bound"].get<double>());
      }
    }
    if (!series.empty()) {
      PlotSpec spec{id + ": deviation from equilibrium", "t", "|deviation|", false, true};
      std::ofstream(fs::path(g.out_dir) / (id + "_deviation.svg")) << render_svg(series, spec);
    }
    if (!cert.empty()) {
      std::vector<PlotSeries> cs;
      for (auto& [k, s] : cert) cs.push_back(s);
      PlotSpec spec{id + ": certificate against lambda", "lambda", "-log(C_final / C0)", true, true};
      std::ofstream(fs::path(g.out_dir) / (id + "_certificate.svg")) << render_svg(cs, spec);
    }
    if (series.empty() && cert.empty()) std::cerr << in << ": nothing to plot\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic focusing NLS on a circle: certified gap bounds and relaxation experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "TOML configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "base random seed");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  ModelFlags mf;

  auto* certify_cmd = app.add_subcommand("certify", "certified log-Sobolev constant and gap with intermediates");
  std::optional<double> alpha, gamma, a, eps;
  mf.add(certify_cmd);
  certify_cmd->add_option("--alpha", alpha, "fraction of the free Hessian kept (default 0.5)");
  certify_cmd->add_option("--gamma", gamma, "Sobolev exponent of the mode split");
  certify_cmd->add_option("--a", a, "mode-split weight a");
  certify_cmd->add_option("--eps", eps, "absorption slack epsilon");
  std::optional<std::string> radius;
  certify_cmd->add_option("--radius", radius, "R rule: norm_powers (default) or squared_norm");

  auto* sample_cmd = app.add_subcommand("sample", "MALA samples of the Gibbs measure as JSONL");
  int modes = 8, count = 1000, chains = 16;
  std::string out;
  std::optional<double> step;
  std::optional<int> burn_in, thin;
  mf.add(sample_cmd);
  sample_cmd->add_option("--modes", modes, "mode cutoff N");
  sample_cmd->add_option("--count", count, "number of samples");
  sample_cmd->add_option("--chains", chains, "independent MALA chains");
  sample_cmd->add_option("--out", out, "JSONL path");
  sample_cmd->add_option("--step", step, "MALA step size");
  sample_cmd->add_option("--burn-in", burn_in, "discarded steps per chain");
  sample_cmd->add_option("--thin", thin, "steps between kept samples");

  auto* sim_cmd = app.add_subcommand("simulate", "ensemble simulation, or an experiment from --config");
  std::optional<int> sim_modes;
  std::optional<long> ensemble;
  std::optional<std::string> initial;
  mf.add(sim_cmd);
  sim_cmd->add_option("--modes", sim_modes, "mode cutoff N");
  sim_cmd->add_option("--ensemble", ensemble, "number of trajectories");
  sim_cmd->add_option("--initial", initial, "free | gibbs | point");
  sim_cmd->add_option("--out", out, "CSV path for plain ensembles");

  auto* witten_cmd = app.add_subcommand("witten", "empirical Witten-Hessian margin against the closed-form bound");
  std::string samples, eps_grid;
  int wmodes = 4, wcount = 1000;
  mf.add(witten_cmd);
  witten_cmd->add_option("--modes", wmodes, "mode cutoff N");
  witten_cmd->add_option("--samples", samples, "JSONL from `sample`")->check(CLI::ExistingFile);
  witten_cmd->add_option("--count", wcount, "Gibbs samples to draw when --samples is absent");
  witten_cmd->add_option("--eps-grid", eps_grid, "comma-separated epsilon values");

  auto* verify_cmd = app.add_subcommand("verify", "run the property suite");
  std::string only;
  double scale = 1.0;
  verify_cmd->add_option("--only", only, "comma-separated criterion numbers");
  verify_cmd->add_option("--scale", scale, "sample-size multiplier");

  auto* report_cmd = app.add_subcommand("report", "SVG plots from experiment CSVs");
  std::vector<std::string> inputs;
  report_cmd->add_option("csv", inputs, "long-format CSV files")->check(CLI::ExistingFile);

  for (auto* sub : {certify_cmd, sample_cmd, sim_cmd, witten_cmd, verify_cmd, report_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (g.threads > 0) omp_set_num_threads(g.threads);
    if (*certify_cmd) return cmd_certify(g, mf, alpha, gamma, a, eps, radius);
    if (*sample_cmd) return cmd_sample(g, mf, modes, count, chains, out, step, burn_in, thin);
    if (*sim_cmd) return cmd_simulate(g, mf, sim_modes, ensemble, initial, out);
    if (*witten_cmd) return cmd_witten(g, mf, wmodes, samples, wcount, eps_grid);
    if (*verify_cmd) return cmd_verify(g, only, scale);
    if (*report_cmd) return cmd_report(g, inputs);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible parameters: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
