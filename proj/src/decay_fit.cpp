#include "gnls/decay_fit.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gnls {

DecayFit fit_window(std::span<const double> t, std::span<const double> d, std::span<const double> se,
                    std::size_t first, std::size_t last) {
  DecayFit f;
  f.first = first;
  f.last = last;
  f.t_lo = t[first];
  f.t_hi = t[last];
  f.points = last - first + 1;
  double sw = 0, sx = 0, sy = 0;
  std::vector<double> w(f.points), y(f.points);
  for (std::size_t i = first; i <= last; ++i) {
    if (!(d[i] > 0)) {
      f.reason = "nonpositive deviation in window";
      return f;
    }
    const std::size_t j = i - first;
    y[j] = std::log(d[i]);
    w[j] = se.empty() || !(se[i] > 0) ? 1.0 : std::pow(d[i] / se[i], 2);
    sw += w[j];
    sx += w[j] * t[i];
    sy += w[j] * y[j];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = first; i <= last; ++i) {
    const std::size_t j = i - first;
    sxx += w[j] * (t[i] - xm) * (t[i] - xm);
    sxy += w[j] * (t[i] - xm) * (y[j] - ym);
    syy += w[j] * (y[j] - ym) * (y[j] - ym);
  }
  if (!(sxx > 0)) {
    f.reason = "degenerate window";
    return f;
  }
  const double slope = sxy / sxx;
  double chi2 = 0;
  for (std::size_t i = first; i <= last; ++i) {
    const std::size_t j = i - first;
    const double res = y[j] - ym - slope * (t[i] - xm);
    chi2 += w[j] * res * res;
  }
  // Known-variance error, inflated by the reduced chi^2 when the scatter exceeds it.
  const double birge = f.points > 2 ? std::max(1.0, chi2 / static_cast<double>(f.points - 2)) : 1.0;
  const bool unit = se.empty();
  const double var = unit ? (f.points > 2 ? chi2 / static_cast<double>(f.points - 2) : 0.0) / sxx : birge / sxx;
  f.rate = -slope;
  f.rate_stderr = std::sqrt(var);
  f.r_squared = syy > 0 ? 1 - chi2 / syy : 1.0;
  f.determinate = true;
  return f;
}

DecayFit estimate_decay_rate(std::span<const double> t, std::span<const double> d, std::span<const double> se,
                             const FitSettings& fs) {
  if (t.size() != d.size() || (!se.empty() && se.size() != d.size()))
    throw std::invalid_argument("decay fit: series lengths differ");
  DecayFit bad;
  if (t.size() < fs.min_points) {
    bad.reason = "too few points";
    return bad;
  }
  const double horizon = t.back() - t.front();
  std::size_t i0 = 0;
  while (i0 < t.size() && t[i0] < t.front() + fs.skip_fraction * horizon) ++i0;
  if (i0 >= t.size()) {
    bad.reason = "too few points";
    return bad;
  }
  const double d0 = d[i0];
  const double se0 = se.empty() ? 0.0 : se[i0];
  if (!(d0 > 3 * se0) || !(d0 > 0)) {
    bad.reason = "no signal";
    return bad;
  }
  const double floor = d0 * std::exp(-fs.efoldings);
  std::size_t i1 = i0;
  while (i1 + 1 < t.size()) {
    const std::size_t n = i1 + 1;
    if (!(d[n] > 0) || d[n] < floor) break;
    if (!se.empty() && d[n] < fs.min_snr * se[n]) break;
    i1 = n;
  }
  if (i1 - i0 + 1 < fs.min_points) {
    bad.reason = "too few points";
    bad.first = i0;
    bad.last = i1;
    return bad;
  }
  DecayFit f = fit_window(t, d, se, i0, i1);
  if (f.determinate && (!(f.rate > 0) || f.rate < 2 * f.rate_stderr)) {
    f.determinate = false;
    f.reason = "no decay";
  }
  return f;
}

DeviationSeries deviation_series(const DeviationData& data, std::span<const std::size_t> trajectories) {
  const std::size_t comps = data.x.size();
  if (comps < 1 || comps > 2) throw std::invalid_argument("deviation needs one or two components");
  const std::size_t ntraj = data.x[0].size();
  const std::size_t nt = data.t.size();
  std::vector<std::size_t> all;
  if (trajectories.empty()) {
    all.resize(ntraj);
    std::iota(all.begin(), all.end(), 0);
    trajectories = all;
  }
  const double n = static_cast<double>(trajectories.size());
  DeviationSeries out{std::vector<double>(nt), std::vector<double>(nt)};
  std::vector<double> mean(comps), var(comps);
  double sign = 1;
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t c = 0; c < comps; ++c) {
      double s = 0, s2 = 0;
      for (auto j : trajectories) {
        const double v = data.x[c][j][i];
        s += v;
        s2 += v * v;
      }
      mean[c] = s / n - data.eq[c];
      var[c] = n > 1 ? std::max(0.0, (s2 - s * s / n) / (n - 1)) / n : 0.0;
      const double eqse = c < data.eq_se.size() ? data.eq_se[c] : 0.0;
      var[c] += eqse * eqse;
    }
    if (comps == 1) {
      if (i == 0) sign = mean[0] < 0 ? -1.0 : 1.0;
      out.d[i] = sign * mean[0];
      out.se[i] = std::sqrt(var[0]);
    } else {
      out.d[i] = std::hypot(mean[0], mean[1]);
      out.se[i] = std::sqrt(0.5 * (var[0] + var[1]));
    }
  }
  return out;
}

DecayFit estimate_decay_rate_ensemble(const DeviationData& data, const FitSettings& fs) {
  const auto full = deviation_series(data);
  DecayFit fit = estimate_decay_rate(data.t, full.d, full.se, fs);
  if (!fit.determinate || fs.bootstrap <= 0) return fit;

  const std::size_t ntraj = data.x[0].size();
  std::mt19937_64 rng(fs.seed);
  std::uniform_int_distribution<std::size_t> pick(0, ntraj - 1);
  std::vector<std::size_t> idx(ntraj);
  std::vector<double> rates;
  rates.reserve(static_cast<std::size_t>(fs.bootstrap));
  for (int b = 0; b < fs.bootstrap; ++b) {
    for (auto& j : idx) j = pick(rng);
    const auto rep = deviation_series(data, idx);
    const auto f = fit_window(data.t, rep.d, rep.se, fit.first, fit.last);
    if (f.determinate) rates.push_back(f.rate);
  }
  if (rates.size() < 2) {
    fit.determinate = false;
    fit.reason = "bootstrap failed";
    return fit;
  }
  const double m = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
  double v = 0;
  for (double r : rates) v += (r - m) * (r - m);
  fit.rate_stderr = std::sqrt(v / static_cast<double>(rates.size() - 1));
  return fit;
}

}  // namespace gnls
