#include "gnls/rng.hpp"

namespace gnls {

namespace {
std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}
}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(seeded(seed, stream)), normal_(0.0, 1.0), uniform_(0.0, 1.0) {}

void GaussianStream::fill(std::span<double> out) {
  for (auto& x : out) x = normal_(engine_);
}

}  // namespace gnls
