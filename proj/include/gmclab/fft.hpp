#pragma once

#include <complex>
#include <vector>

namespace gmclab::fft {

// In-place complex transforms on 2^m grids, d = 1 or 2 (row-major, x fastest).
//   forward:  F[k] = sum_j x[j] exp(-2 pi i k.j / n)
//   inverse:  x[j] = sum_k F[k] exp(+2 pi i k.j / n)
// Neither direction normalizes. `data.size()` must equal n^d.
// Safe to call concurrently from multiple threads.
void forward(std::vector<std::complex<double>>& data, int d, int n);
void inverse(std::vector<std::complex<double>>& data, int d, int n);

}  // namespace gmclab::fft
