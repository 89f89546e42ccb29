#pragma once

#include <cstddef>
#include <vector>

#include "slowshift/units.hpp"

namespace slowshift::detail {

/// Unnormalised complex DFT, sign convention X_k = Σ x_n e^{-2πi kn/N}.
/// A tone e^{+2πi f τ} therefore lands on the positive-frequency bin f.
void fft_forward(std::vector<cplx>& data);
/// Unnormalised inverse: x_n = Σ X_k e^{+2πi kn/N}.
void fft_backward(std::vector<cplx>& data);

/// Frequency of bin k for an N-point transform with sample step dt (µs), in MHz.
double fft_frequency(std::size_t k, std::size_t n, double dt_us);

std::size_t next_pow2(std::size_t n);

}  // namespace slowshift::detail
