#include "gnls/kernels.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "gnls/errors.hpp"

namespace gnls {

double EnsembleSeries::mean(std::size_t o, std::size_t i) const {
  double s = 0;
  for (std::size_t j = 0; j < trajectories; ++j) s += at(o, j, i);
  return s / static_cast<double>(trajectories);
}

double EnsembleSeries::stderr_of_mean(std::size_t o, std::size_t i) const {
  const double m = mean(o, i);
  double v = 0;
  for (std::size_t j = 0; j < trajectories; ++j) v += std::pow(at(o, j, i) - m, 2);
  const double n = static_cast<double>(trajectories);
  return n > 1 ? std::sqrt(v / (n - 1) / n) : 0.0;
}

namespace {

// Runs one trajectory into its slots; returns an error message on blow-up.
std::string run_trajectory(const SpectralField& f0, const ModelParams& mp, const SimConfig& sc, std::size_t j,
                           EnsembleSeries& out) {
  SplitStepIntegrator integ(mp, f0.modes(), sc);
  GaussianStream rng(sc.seed, j);
  SpectralField f = f0;
  const std::size_t nt = out.t.size();
  const std::size_t nobs = sc.observables.size();
  auto record = [&](std::size_t i) {
    for (std::size_t o = 0; o < nobs; ++o)
      out.values[(o * out.trajectories + j) * nt + i] = sc.observables[o].evaluate(f, integ.evaluator());
  };
  record(0);
  const long n = sc.steps();
  std::size_t slot = 1;
  for (long s = 1; s <= n; ++s) {
    integ.step(f, rng);
    const double S = l2sq(f);
    if (!(S <= sc.l2_cap)) {
      for (; slot < nt; ++slot)
        for (std::size_t o = 0; o < nobs; ++o)
          out.values[(o * out.trajectories + j) * nt + slot] = std::numeric_limits<double>::quiet_NaN();
      return "trajectory " + std::to_string(j) + " exceeded the L2 cap at t = " + std::to_string(s * sc.dt);
    }
    if (s % sc.record_every == 0) record(slot++);
  }
  return {};
}

}  // namespace

EnsembleSeries simulate_ensemble(const std::vector<SpectralField>& initial, const ModelParams& mp,
                                 const SimConfig& sc, std::size_t trajectories, Exec exec) {
  mp.validate();
  sc.validate();
  if (initial.empty()) throw ConfigError("ensemble needs an initial field");
  if (initial.size() != 1 && initial.size() != trajectories)
    throw ConfigError("initial fields must number one or one per trajectory");
  EnsembleSeries out;
  out.trajectories = trajectories;
  for (const auto& o : sc.observables) out.names.push_back(o.name());
  const long n = sc.steps();
  for (long s = 0; s <= n; s += sc.record_every) out.t.push_back(static_cast<double>(s) * sc.dt);
  out.values.assign(sc.observables.size() * trajectories * out.t.size(), 0.0);
  std::vector<std::string> errors(trajectories);
  std::vector<std::exception_ptr> crashes(trajectories);

  const auto body = [&](std::size_t j) {
    try {
      errors[j] = run_trajectory(initial.size() == 1 ? initial[0] : initial[j], mp, sc, j, out);
    } catch (...) {
      crashes[j] = std::current_exception();
    }
  };
  const auto count = static_cast<long>(trajectories);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long j = 0; j < count; ++j) body(static_cast<std::size_t>(j));
  } else {
    for (long j = 0; j < count; ++j) body(static_cast<std::size_t>(j));
  }
  for (auto& c : crashes)
    if (c) std::rethrow_exception(c);
  for (std::size_t j = 0; j < trajectories; ++j)
    if (!errors[j].empty()) out.failures.emplace_back(j, errors[j]);
  return out;
}

std::vector<GibbsSamples> sample_chains(const ModelParams& mp, int N, const ChainConfig& cc, int per_chain, int chains,
                                        Exec exec) {
  if (chains < 1) throw ConfigError("need at least one chain");
  std::vector<GibbsSamples> out(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> crashes(out.size());
  const auto body = [&](int c) {
    try {
      out[static_cast<std::size_t>(c)] = sample_gibbs(mp, N, cc, per_chain, static_cast<std::uint64_t>(c));
    } catch (...) {
      crashes[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int c = 0; c < chains; ++c) body(c);
  } else {
    for (int c = 0; c < chains; ++c) body(c);
  }
  for (auto& e : crashes)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<SpectralField> sample_free_batch(const ModelParams& mp, int N, std::uint64_t seed, std::size_t count,
                                             Exec exec) {
  std::vector<SpectralField> out(count);
  const auto n = static_cast<long>(count);
  const auto body = [&](long j) {
    GaussianStream rng(seed, static_cast<std::uint64_t>(j));
    out[static_cast<std::size_t>(j)] = sample_free(mp, N, rng);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < n; ++j) body(j);
  } else {
    for (long j = 0; j < n; ++j) body(j);
  }
  return out;
}

std::vector<double> pencil_minima(const std::vector<std::vector<std::complex<double>>>& samples,
                                  const WittenParams& wp, Exec exec) {
  std::vector<double> out(samples.size());
  const auto n = static_cast<long>(samples.size());
  std::vector<std::exception_ptr> crashes(samples.size());
  const auto body = [&](long i) {
    try {
      out[static_cast<std::size_t>(i)] = pencil_min(hessian_blocks(samples[static_cast<std::size_t>(i)], wp));
    } catch (...) {
      crashes[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i) body(i);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
  for (auto& e : crashes)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace gnls
