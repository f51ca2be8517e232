#pragma once

// Direct-loop reference kernels. Deliberately naive: every output element is
// computed from its definition with bounds checks in the innermost loop. They
// share nothing with the optimized kernels in ops.cpp/dsp.cpp and serve as the
// oracle for tests and `istftnet selftest`.

#include <complex>
#include <vector>

#include "istftnet/ops.hpp"

namespace istftnet::reference {

Tensor conv1d(const Tensor& x, const ConvParams& p);
Tensor conv_transpose1d(const Tensor& x, const ConvParams& p);
Tensor conv2d(const Tensor& x, const ConvParams& p);
Tensor conv_transpose2d(const Tensor& x, const ConvParams& p);

/// O(n^2) DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N).
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x);
/// O(n^2) inverse DFT including the 1/N factor.
std::vector<std::complex<double>> idft(const std::vector<std::complex<double>>& x);

}  // namespace istftnet::reference
