#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace gnls {

/// Source of independent standard normal variates.
class NormalSource {
 public:
  virtual ~NormalSource() = default;
  virtual void fill(std::span<double> out) = 0;
};

/// One reproducible stream per (seed, stream index). Streams with different
/// indices are seeded through seed_seq and are independent for practical purposes.
class GaussianStream final : public NormalSource {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream);

  void fill(std::span<double> out) override;
  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace gnls
