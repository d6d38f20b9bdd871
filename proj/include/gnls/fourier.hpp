#pragma once

#include <complex>
#include <span>

namespace gnls {

using cplx = std::complex<double>;

/// Smallest 2^a 3^b 5^c that is >= n.
int fft_friendly_size(int n);

/// Grid size used for every quartic product: at least 2(2N+1), so
/// products of degree four in the field are resolved without aliasing.
int dealiased_grid_size(int modes);

namespace fourier {

/// out[j] = sum_m in[m] exp(+2 pi i m j / M). Thread-safe.
void backward(std::span<const cplx> in, std::span<cplx> out);

/// out[m] = sum_j in[j] exp(-2 pi i m j / M). Thread-safe.
void forward(std::span<const cplx> in, std::span<cplx> out);

}  // namespace fourier
}  // namespace gnls
