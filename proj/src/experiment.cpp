#include "gnls/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "gnls/config.hpp"
#include "gnls/errors.hpp"
#include "gnls/io.hpp"

namespace gnls {

using nlohmann::json;

namespace {

struct Target {
  std::string name;
  std::vector<std::size_t> obs;  // indices into the observable list
  bool gauge_mode = false;       // complex mean of a coefficient, equilibrium value 0
};

int parse_mode_target(const std::string& s) {
  if (s.rfind("mode(", 0) != 0 || s.back() != ')') return INT32_MIN;
  try {
    std::size_t used = 0;
    const std::string inner = s.substr(5, s.size() - 6);
    const int k = std::stoi(inner, &used);
    if (used == inner.size()) return k;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad target: " + s);
}

std::vector<Target> expand_targets(const std::vector<std::string>& names, int N, std::vector<Observable>& obs) {
  std::map<std::string, std::size_t> index;
  auto add = [&](const Observable& o) {
    const auto key = o.name();
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if ((o.kind == Observable::Kind::ModeRe || o.kind == Observable::Kind::ModeIm ||
         o.kind == Observable::Kind::ModeSq) &&
        std::abs(o.k) > N)
      throw ConfigError("observable " + key + " refers to a mode beyond N");
    obs.push_back(o);
    return index[key] = obs.size() - 1;
  };
  for (const auto& o : obs) index[o.name()] = static_cast<std::size_t>(&o - obs.data());
  std::vector<Target> out;
  for (const auto& n : names) {
    Target t;
    t.name = n;
    const int k = parse_mode_target(n);
    if (k != INT32_MIN) {
      t.obs = {add({Observable::Kind::ModeRe, k}), add({Observable::Kind::ModeIm, k})};
      t.gauge_mode = true;
    } else {
      t.obs = {add(Observable::parse(n))};
    }
    out.push_back(std::move(t));
  }
  return out;
}

json fit_json(const DecayFit& f) {
  json j{{"determinate", f.determinate}, {"rate", f.rate},   {"rate_stderr", f.rate_stderr},
         {"window", {f.t_lo, f.t_hi}},   {"points", f.points}, {"r_squared", f.r_squared}};
  if (!f.determinate) j["reason"] = f.reason;
  return j;
}

json sim_json(const SimConfig& sc) {
  std::vector<std::string> names;
  for (const auto& o : sc.observables) names.push_back(o.name());
  return json{{"dt", sc.dt},         {"t_final", sc.t_final},       {"scheme", sc.scheme},
              {"seed", sc.seed},     {"record_every", sc.record_every}, {"observables", names},
              {"l2_cap", sc.l2_cap}};
}

void write_series_csv(LongCsvWriter& csv, const std::string& id, const EnsembleSeries& es, std::size_t per_traj) {
  const std::size_t nt = es.t.size();
  for (std::size_t o = 0; o < es.names.size(); ++o) {
    for (std::size_t j = 0; j < std::min(per_traj, es.trajectories); ++j)
      for (std::size_t i = 0; i < nt; ++i) csv.row(id, es.t[i], es.names[o], std::to_string(j), es.at(o, j, i));
    for (std::size_t i = 0; i < nt; ++i) csv.row(id, es.t[i], es.names[o], "mean", es.mean(o, i));
    for (std::size_t i = 0; i < nt; ++i) csv.row(id, es.t[i], es.names[o], "stderr", es.stderr_of_mean(o, i));
  }
}

std::vector<SpectralField> initial_fields(const ExperimentConfig& cfg, std::uint64_t seed, double& acceptance) {
  if (cfg.initial == "point") return {point_initial(cfg.model, cfg.modes, cfg.point_l2sq)};
  if (cfg.initial == "free") return sample_free_batch(cfg.model, cfg.modes, seed, cfg.ensemble, cfg.exec);
  // gibbs: spread the ensemble over the configured chains.
  ChainConfig cc = cfg.chain;
  cc.seed = seed;
  const int per = static_cast<int>((cfg.ensemble + static_cast<std::size_t>(cfg.chains) - 1) /
                                   static_cast<std::size_t>(cfg.chains));
  const auto runs = sample_chains(cfg.model, cfg.modes, cc, per, cfg.chains, cfg.exec);
  std::vector<SpectralField> out;
  double acc = 0;
  for (const auto& r : runs) {
    acc += r.acceptance;
    for (const auto& f : r.samples)
      if (out.size() < cfg.ensemble) out.push_back(f);
  }
  acceptance = acc / static_cast<double>(runs.size());
  return out;
}

// Trajectories that completed; failed ones are excluded from statistics.
std::vector<std::size_t> good_trajectories(const EnsembleSeries& es) {
  std::set<std::size_t> bad;
  for (const auto& f : es.failures) bad.insert(f.first);
  std::vector<std::size_t> good;
  for (std::size_t j = 0; j < es.trajectories; ++j)
    if (!bad.count(j)) good.push_back(j);
  return good;
}

json run_stationarity(const ExperimentConfig& cfg, const EnsembleSeries& es, const std::vector<Target>& targets,
                      bool& passed) {
  const auto good = good_trajectories(es);
  const double n = static_cast<double>(good.size());
  json checks = json::array();
  passed = true;
  for (const auto& tg : targets) {
    const std::size_t o = tg.obs[0];
    for (int moment = 1; moment <= 2; ++moment)
      for (double tc : cfg.check_times) {
        const auto it = std::lower_bound(es.t.begin(), es.t.end(), tc - 1e-9);
        if (it == es.t.end()) throw ConfigError("check time beyond the horizon");
        const std::size_t i = static_cast<std::size_t>(it - es.t.begin());
        double s = 0, s2 = 0;
        for (auto j : good) {
          const double a = std::pow(es.at(o, j, i), moment), b = std::pow(es.at(o, j, 0), moment);
          s += a - b;
          s2 += (a - b) * (a - b);
        }
        const double mean = s / n;
        const double se = std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1)) / n);
        const double z = se > 0 ? mean / se : 0.0;
        const bool ok = std::abs(z) <= 3;
        passed = passed && ok;
        checks.push_back({{"observable", es.names[o]}, {"moment", moment}, {"t", es.t[i]}, {"drift", mean},
                          {"stderr", se}, {"z", z}, {"pass", ok}});
      }
  }
  return checks;
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::set<std::string> kinds{"stationarity", "relaxation", "bound_comparison", "lambda_scaling"};
  if (!kinds.count(kind)) throw ConfigError("unknown experiment kind: " + kind);
  if (id.empty() || id.find_first_of(",/\\ \n") != std::string::npos)
    throw ConfigError("experiment id must be a plain token");
  model.validate();
  if (kind == "lambda_scaling") {
    if (lambdas.size() < 2) throw ConfigError("lambda_scaling needs at least two lambdas");
    for (double l : lambdas)
      if (!(l > 0)) throw ConfigError("lambdas must be positive");
    return;
  }
  if (modes < 0 || modes > 256) throw ConfigError("modes must lie in [0, 256]");
  if (ensemble < 2) throw ConfigError("ensemble must be at least 2");
  sim.validate();
  if (initial != "free" && initial != "gibbs" && initial != "point")
    throw ConfigError("initial must be free, gibbs or point");
  if (!(point_l2sq >= 0)) throw ConfigError("point_l2sq must be nonnegative");
  chain.validate();
  if (chains < 1 || equilibrium_per_chain < 2) throw ConfigError("need chains >= 1 and equilibrium_per_chain >= 2");
  if (targets.empty()) throw ConfigError("no targets configured");
}

ExperimentConfig read_experiment(const json& root, ExperimentConfig cfg) {
  static const std::set<std::string> sections{"experiment", "model", "sim", "chain", "bounds", "fit"};
  for (auto it = root.begin(); it != root.end(); ++it)
    if (!sections.count(it.key())) throw ConfigError("unknown config section or key: " + it.key());
  auto get = [&](const char* s) { return root.contains(s) ? root.at(s) : json(); };
  auto number = [](const json& v, const std::string& k) {
    if (!v.is_number()) throw ConfigError("expected a number for '" + k + "'");
    return v.get<double>();
  };
  auto strings = [](const json& v, const std::string& k) {
    if (!v.is_array()) throw ConfigError(k + " must be an array");
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(x.get<std::string>());
    return out;
  };
  auto numbers = [&](const json& v, const std::string& k) {
    if (!v.is_array()) throw ConfigError(k + " must be an array");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, k));
    return out;
  };

  const json ex = get("experiment");
  if (!ex.is_null()) {
    for (auto it = ex.begin(); it != ex.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "kind") cfg.kind = v.get<std::string>();
      else if (k == "id") cfg.id = v.get<std::string>();
      else if (k == "targets") cfg.targets = strings(v, k);
      else if (k == "lambdas") cfg.lambdas = numbers(v, k);
      else if (k == "check_times") cfg.check_times = numbers(v, k);
      else if (k == "csv_trajectories") cfg.csv_trajectories = static_cast<std::size_t>(number(v, k));
      else if (k == "chains") cfg.chains = static_cast<int>(number(v, k));
      else if (k == "equilibrium_per_chain") cfg.equilibrium_per_chain = static_cast<int>(number(v, k));
      else throw ConfigError("unknown key in [experiment]: " + k);
    }
  }
  cfg.model = read_model(get("model"), cfg.model);
  cfg.chain = read_chain(get("chain"), cfg.chain);
  cfg.bounds = read_bounds(get("bounds"), cfg.bounds);
  const json sim = get("sim");
  cfg.sim = read_sim(sim, cfg.sim);
  static const std::set<std::string> sim_keys{"dt",    "t_final", "seed",     "record_every", "l2_cap",
                                              "scheme", "noise",  "damping",  "rotation",     "observables",
                                              "modes", "ensemble", "initial", "point_l2sq"};
  if (!sim.is_null()) {
    for (auto it = sim.begin(); it != sim.end(); ++it) {
      const auto& k = it.key();
      if (!sim_keys.count(k)) throw ConfigError("unknown key in [sim]: " + k);
      if (k == "modes") cfg.modes = static_cast<int>(number(it.value(), k));
      else if (k == "ensemble") cfg.ensemble = static_cast<std::size_t>(number(it.value(), k));
      else if (k == "initial") cfg.initial = it.value().get<std::string>();
      else if (k == "point_l2sq") cfg.point_l2sq = number(it.value(), k);
    }
  }
  const json fit = get("fit");
  if (!fit.is_null()) {
    for (auto it = fit.begin(); it != fit.end(); ++it) {
      const auto& k = it.key();
      const double v = number(it.value(), k);
      if (k == "skip_fraction") cfg.fit.skip_fraction = v;
      else if (k == "efoldings") cfg.fit.efoldings = v;
      else if (k == "min_snr") cfg.fit.min_snr = v;
      else if (k == "bootstrap") cfg.fit.bootstrap = static_cast<int>(v);
      else if (k == "min_points") cfg.fit.min_points = static_cast<std::size_t>(v);
      else throw ConfigError("unknown key in [fit]: " + k);
    }
  }
  return cfg;
}

SpectralField point_initial(const ModelParams& mp, int N, double l2sq_target) {
  double total = 0;
  for (int k = -N; k <= N; ++k) total += 1 / (mp.beta * mp.omega(k));
  SpectralField f(N, mp.L);
  for (int k = -N; k <= N; ++k) f[k] = std::sqrt(l2sq_target / (mp.beta * mp.omega(k)) / total);
  return f;
}

EquilibriumEstimate equilibrium_means(const ModelParams& mp, int N, const std::vector<Observable>& obs,
                                      const ChainConfig& cc, int chains, int per_chain, Exec exec) {
  const auto runs = sample_chains(mp, N, cc, per_chain, chains, exec);
  EquilibriumEstimate eq;
  eq.mean.assign(obs.size(), 0.0);
  eq.se.assign(obs.size(), 0.0);
  HamiltonianEvaluator ev(mp, N);
  std::vector<std::vector<double>> chain_means(obs.size(), std::vector<double>(runs.size()));
  for (std::size_t c = 0; c < runs.size(); ++c) {
    eq.acceptance += runs[c].acceptance / static_cast<double>(runs.size());
    for (std::size_t o = 0; o < obs.size(); ++o) {
      double s = 0;
      for (const auto& f : runs[c].samples) s += obs[o].evaluate(f, ev);
      chain_means[o][c] = s / static_cast<double>(runs[c].samples.size());
    }
  }
  const double C = static_cast<double>(runs.size());
  for (std::size_t o = 0; o < obs.size(); ++o) {
    const auto& m = chain_means[o];
    eq.mean[o] = std::accumulate(m.begin(), m.end(), 0.0) / C;
    double v = 0;
    for (double x : m) v += (x - eq.mean[o]) * (x - eq.mean[o]);
    eq.se[o] = C > 1 ? std::sqrt(v / (C - 1) / C) : 0.0;
  }
  return eq;
}

double scaling_exponent(const std::vector<double>& lambdas, const std::vector<double>& log_ratio) {
  if (lambdas.size() != log_ratio.size() || lambdas.size() < 2) throw std::invalid_argument("scaling fit sizes");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    x.push_back(std::log(lambdas[i]));
    y.push_back(std::log(-log_ratio[i]));
  }
  const double n = static_cast<double>(x.size());
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n, ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - xm) * (y[i] - ym);
    sxx += (x[i] - xm) * (x[i] - xm);
  }
  return sxy / sxx;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg_in) {
  cfg_in.validate();
  ExperimentConfig cfg = cfg_in;
  ExperimentReport rep;
  json& s = rep.summary;
  s["schema_version"] = kSchemaVersion;
  s["experiment_id"] = cfg.id;
  s["kind"] = cfg.kind;
  s["model"] = to_json(cfg.model);

  std::unique_ptr<LongCsvWriter> csv;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    csv = std::make_unique<LongCsvWriter>(cfg.out_dir / (cfg.id + ".csv"));
  }
  const std::uint64_t base = cfg.sim.seed;

  if (cfg.kind == "lambda_scaling") {
    std::vector<double> log_ratio;
    json rows = json::array();
    for (double lam : cfg.lambdas) {
      ModelParams mp = cfg.model;
      mp.lambda = lam;
      const auto cert = certify(mp, cfg.bounds);
      log_ratio.push_back(cert.log_C_final - std::log(cert.C0));
      rows.push_back({{"lambda", lam}, {"certificate", to_json(cert)}});
      if (csv) {
        csv->row(cfg.id, lam, "log_C_final", "certificate", cert.log_C_final);
        csv->row(cfg.id, lam, "C0", "certificate", cert.C0);
        csv->row(cfg.id, lam, "neg_log_ratio", "certificate", -log_ratio.back());
      }
    }
    bool finite = true;
    for (double v : log_ratio) finite = finite && v < 0;
    const double w = finite ? scaling_exponent(cfg.lambdas, log_ratio) : std::nan("");
    s["results"] = {{"certificates", rows}, {"exponent", finite ? json(w) : json(nullptr)}};
    rep.passed = finite && w >= 2;
    s["passed"] = rep.passed;
    if (!cfg.out_dir.empty()) write_json(cfg.out_dir / (cfg.id + ".json"), s);
    return rep;
  }

  std::vector<Observable> obs = cfg.sim.observables;
  const auto targets = expand_targets(cfg.targets, cfg.modes, obs);
  cfg.sim.observables = obs;
  s["modes"] = cfg.modes;
  s["ensemble"] = cfg.ensemble;
  s["initial"] = cfg.initial;
  s["sim"] = sim_json(cfg.sim);

  double init_acc = 0;
  const auto init = initial_fields(cfg, base * 4 + 1, init_acc);
  if (cfg.initial == "gibbs") s["initial_chain_acceptance"] = init_acc;
  const auto es = simulate_ensemble(init, cfg.model, cfg.sim, cfg.ensemble, cfg.exec);
  if (csv) write_series_csv(*csv, cfg.id, es, cfg.csv_trajectories);
  bool aborted = !es.failures.empty();
  if (aborted) {
    json f = json::array();
    for (const auto& [j, msg] : es.failures) f.push_back({{"trajectory", j}, {"message", msg}});
    s["partial"] = true;
    s["failures"] = f;
  }

  if (cfg.kind == "stationarity") {
    bool ok = false;
    s["results"] = {{"checks", run_stationarity(cfg, es, targets, ok)}};
    rep.passed = ok && !aborted;
    s["passed"] = rep.passed;
    if (!cfg.out_dir.empty()) write_json(cfg.out_dir / (cfg.id + ".json"), s);
    return rep;
  }

  // relaxation and bound_comparison
  ChainConfig eqc = cfg.chain;
  eqc.seed = base * 4 + 2;
  const auto eq = equilibrium_means(cfg.model, cfg.modes, obs, eqc, cfg.chains, cfg.equilibrium_per_chain, cfg.exec);
  s["equilibrium"] = {{"acceptance", eq.acceptance}, {"chains", cfg.chains}, {"per_chain", cfg.equilibrium_per_chain}};
  s["fit_settings"] = {{"skip_fraction", cfg.fit.skip_fraction}, {"efoldings", cfg.fit.efoldings},
                       {"min_snr", cfg.fit.min_snr},             {"bootstrap", cfg.fit.bootstrap},
                       {"min_points", cfg.fit.min_points}};

  const auto good = good_trajectories(es);
  std::optional<GapCertificate> cert;
  if (cfg.kind == "bound_comparison") {
    cert = certify(cfg.model, cfg.bounds);
    s["certificate"] = to_json(*cert);
  }

  json fits = json::object();
  bool all_ok = true;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const auto& tg = targets[ti];
    DeviationData dd;
    dd.t = es.t;
    for (auto o : tg.obs) {
      std::vector<std::vector<double>> comp;
      comp.reserve(good.size());
      for (auto j : good) {
        std::vector<double> row(es.t.size());
        for (std::size_t i = 0; i < es.t.size(); ++i) row[i] = es.at(o, j, i);
        comp.push_back(std::move(row));
      }
      dd.x.push_back(std::move(comp));
      dd.eq.push_back(tg.gauge_mode ? 0.0 : eq.mean[o]);
      dd.eq_se.push_back(tg.gauge_mode ? 0.0 : eq.se[o]);
    }
    FitSettings fs = cfg.fit;
    fs.seed = base * 4 + 3 + 1000 * ti;
    const auto fit = estimate_decay_rate_ensemble(dd, fs);
    json fj = fit_json(fit);
    fj["equilibrium"] = dd.eq.size() == 1 ? json(dd.eq[0]) : json(dd.eq);
    fj["equilibrium_stderr"] = dd.eq_se.size() == 1 ? json(dd.eq_se[0]) : json(dd.eq_se);
    if (csv) {
      const auto dev = deviation_series(dd);
      for (std::size_t i = 0; i < es.t.size(); ++i) csv->row(cfg.id, es.t[i], "deviation:" + tg.name, "mean", dev.d[i]);
      for (std::size_t i = 0; i < es.t.size(); ++i)
        csv->row(cfg.id, es.t[i], "deviation:" + tg.name, "stderr", dev.se[i]);
    }
    if (cert) {
      const double upper = fit.rate + 3 * fit.rate_stderr;
      json cmp;
      const bool vs_gap = fit.determinate && upper >= cert->rate_bound;
      cmp["certified_rate"] = {{"bound", cert->rate_bound}, {"measured_minus_bound", fit.rate - cert->rate_bound},
                               {"ci3_low", fit.rate - 3 * fit.rate_stderr - cert->rate_bound},
                               {"ci3_high", upper - cert->rate_bound}, {"pass", vs_gap}};
      bool ok = vs_gap;
      if (cert->witten_rate_bound) {
        const double b = *cert->witten_rate_bound;
        const bool vs_w = fit.determinate && upper >= b;
        cmp["witten_rate"] = {{"bound", b}, {"measured_minus_bound", fit.rate - b},
                              {"ci3_low", fit.rate - 3 * fit.rate_stderr - b}, {"ci3_high", upper - b},
                              {"pass", vs_w}};
        ok = ok && vs_w;
      }
      fj["comparison"] = cmp;
      all_ok = all_ok && ok;
    } else {
      all_ok = all_ok && fit.determinate;
    }
    fits[tg.name] = fj;
  }
  s["results"] = {{"fits", fits}};
  rep.passed = all_ok && !aborted;
  s["passed"] = rep.passed;
  if (!cfg.out_dir.empty()) write_json(cfg.out_dir / (cfg.id + ".json"), s);
  return rep;
}

}  // namespace gnls
