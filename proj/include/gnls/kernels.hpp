#pragma once

// Ensemble-level kernels. Each has a serial reference path and an OpenMP path;
// both draw from the same per-index RNG streams, so their results agree bit for bit.

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gnls/dynamics.hpp"
#include "gnls/measures.hpp"
#include "gnls/witten.hpp"

namespace gnls {

enum class Exec { serial, parallel };

struct EnsembleSeries {
  std::vector<double> t;
  std::vector<std::string> names;
  std::size_t trajectories = 0;
  /// Row-major [observable][trajectory][time].
  std::vector<double> values;
  /// (trajectory, message) for aborted trajectories; their remaining values are NaN.
  std::vector<std::pair<std::size_t, std::string>> failures;

  double at(std::size_t o, std::size_t j, std::size_t i) const {
    return values[(o * trajectories + j) * t.size() + i];
  }
  double mean(std::size_t o, std::size_t i) const;
  double stderr_of_mean(std::size_t o, std::size_t i) const;
};

/// Trajectory j starts from initial[j] (or initial[0] when only one is given)
/// and uses noise stream j of sc.seed.
EnsembleSeries simulate_ensemble(const std::vector<SpectralField>& initial, const ModelParams& mp,
                                 const SimConfig& sc, std::size_t trajectories, Exec exec);

/// Independent chains, chain c on stream c of cc.seed.
std::vector<GibbsSamples> sample_chains(const ModelParams& mp, int N, const ChainConfig& cc, int per_chain,
                                        int chains, Exec exec);

/// count draws from the free measure, draw j on stream j of seed.
std::vector<SpectralField> sample_free_batch(const ModelParams& mp, int N, std::uint64_t seed, std::size_t count,
                                             Exec exec);

/// Smallest pencil eigenvalue per sample.
std::vector<double> pencil_minima(const std::vector<std::vector<std::complex<double>>>& samples,
                                  const WittenParams& wp, Exec exec);

}  // namespace gnls
