#pragma once

#include <span>
#include <vector>

#include "scaletrack/tensor.hpp"

namespace scaletrack {

/// Which spatial axes of a tensor carry frequency after a transform.
enum class Axes { rows = 1, cols = 2, both = 3 };

/// Full (not half) complex spectrum of a tensor, transformed per channel.
struct Spectrum {
    CTensor data;
    Axes axes = Axes::both;
};

// Conventions: forward is unnormalized, inverse divides by the product of the
// transformed axis lengths.

std::vector<cdouble> fft(std::span<const double> x);
std::vector<cdouble> fft(std::span<const cdouble> x);
std::vector<cdouble> ifft(std::span<const cdouble> x);

Spectrum fft(const Tensor& x, Axes axes = Axes::both);
Spectrum fft(const CTensor& x, Axes axes = Axes::both);
CTensor ifft(const Spectrum& s);
/// Real part of the inverse transform.
Tensor ifft_real(const Spectrum& s);

/// out[t] = sum_n a[n] * b[n + t] (indices modulo each axis), per channel.
Tensor circular_correlate(const Tensor& a, const Tensor& b);

/// 0.5 * (1 - cos(2 pi n / (L - 1))); a length-1 window is [1].
std::vector<double> hann_window(std::size_t length);
/// Separable outer product of two Hann windows.
Tensor hann_window(std::size_t rows, std::size_t cols);

} // namespace scaletrack
