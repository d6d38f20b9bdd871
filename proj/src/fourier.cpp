#include "gnls/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace gnls {

int fft_friendly_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

int dealiased_grid_size(int modes) { return fft_friendly_size(2 * (2 * modes + 1)); }

namespace fourier {
namespace {

// Plans are created once per size under a lock; fftw_execute_dft on
// distinct arrays is thread-safe, and FFTW_UNALIGNED lets any buffer be used.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~PlanPair() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int size) {
  static std::map<int, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(size);
  if (it != cache.end()) return *it->second;
  std::vector<cplx> a(size), b(size);
  auto* in = reinterpret_cast<fftw_complex*>(a.data());
  auto* out = reinterpret_cast<fftw_complex*>(b.data());
  auto pp = std::make_unique<PlanPair>();
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  pp->fwd = fftw_plan_dft_1d(size, in, out, FFTW_FORWARD, flags);
  pp->bwd = fftw_plan_dft_1d(size, in, out, FFTW_BACKWARD, flags);
  if (!pp->fwd || !pp->bwd) throw std::runtime_error("fftw plan creation failed");
  return *cache.emplace(size, std::move(pp)).first->second;
}

void execute(fftw_plan plan, std::span<const cplx> in, std::span<cplx> out) {
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void check_sizes(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != out.size() || in.empty())
    throw std::invalid_argument("fourier: input and output sizes differ");
  if (in.data() == out.data()) throw std::invalid_argument("fourier: transforms are out-of-place");
}

}  // namespace

void backward(std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(in, out);
  execute(plans_for(static_cast<int>(in.size())).bwd, in, out);
}

void forward(std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(in, out);
  execute(plans_for(static_cast<int>(in.size())).fwd, in, out);
}

}  // namespace fourier
}  // namespace gnls
