#pragma once

#include <complex>
#include <vector>

namespace dfrc {

/// Unnormalized in-place DFT, exponent e^{-j2*pi*kn/N}.
void fft_forward(std::vector<std::complex<double>>& data);

/// Unnormalized in-place inverse DFT, exponent e^{+j2*pi*kn/N}.
void fft_backward(std::vector<std::complex<double>>& data);

}  // namespace dfrc
