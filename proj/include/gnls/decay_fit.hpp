#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gnls {

struct DecayFit {
  bool determinate = false;
  std::string reason;  // set when indeterminate
  double rate = 0;
  double rate_stderr = 0;
  double t_lo = 0, t_hi = 0;
  double r_squared = 0;
  std::size_t points = 0;
  std::size_t first = 0, last = 0;  // index window, inclusive
};

struct FitSettings {
  double skip_fraction = 0.1;
  double efoldings = 2.0;
  double min_snr = 2.0;  // stop the window once d < min_snr * se
  std::size_t min_points = 5;
  int bootstrap = 200;
  std::uint64_t seed = 0;
};

/// Weighted least squares of log d(t) on the automatic window: skip a fraction of
/// the horizon, then keep points while d stays positive, above min_snr * se and
/// within the first e-foldings. se may be empty (unit weights).
DecayFit estimate_decay_rate(std::span<const double> t, std::span<const double> d, std::span<const double> se,
                             const FitSettings& fs = {});

/// Same fit on a fixed index window, used for bootstrap replicates.
DecayFit fit_window(std::span<const double> t, std::span<const double> d, std::span<const double> se,
                    std::size_t first, std::size_t last);

/// Per-trajectory samples x[c][j][i] of one or two components (c), trajectory j, time i.
/// Deviation: with one component, (mean - eq) signed so that it starts positive;
/// with two, the modulus of the complex mean minus eq.
struct DeviationData {
  std::vector<double> t;
  std::vector<std::vector<std::vector<double>>> x;
  std::vector<double> eq;     // per component
  std::vector<double> eq_se;  // uncertainty of eq, per component
};

struct DeviationSeries {
  std::vector<double> d, se;
};

DeviationSeries deviation_series(const DeviationData& data, std::span<const std::size_t> trajectories = {});

/// Automatic window on the full ensemble, stderr from a trajectory bootstrap on that window.
DecayFit estimate_decay_rate_ensemble(const DeviationData& data, const FitSettings& fs = {});

}  // namespace gnls
