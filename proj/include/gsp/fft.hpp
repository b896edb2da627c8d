#pragma once

#include <complex>
#include <vector>

namespace gsp {

// In-place radix-2 FFT; size must be a power of two. inverse=true applies the
// conjugate transform without the 1/n factor.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse = false);

std::size_t next_pow2(std::size_t n);

}  // namespace gsp
