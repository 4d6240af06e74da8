#pragma once

#include <cstddef>
#include <span>

#include "scaletrack/tensor.hpp"

namespace scaletrack {

struct Peak1D {
    std::size_t grid_index = 0;  // argmax of the sampled response
    double position = 0.0;       // refined, within grid_index +- 0.5
    double value = 0.0;          // interpolant at `position`
};

struct Peak2D {
    std::size_t grid_row = 0, grid_col = 0;
    double row = 0.0, col = 0.0;
    double value = 0.0;
};

/// Maximises the trigonometric interpolant of a periodic sampled response by
/// Newton's method started at the grid argmax. Steps that leave the +-0.5
/// cell around the argmax are clamped to it. Length-1 input returns index 0.
Peak1D refine_peak(std::span<const double> response, int iterations);

/// Two-dimensional counterpart on channel 0 of `response`.
Peak2D refine_peak(const Tensor& response, int iterations);

/// Value of the trigonometric interpolant of `response` at continuous index x.
double interpolant_at(std::span<const double> response, double x);

} // namespace scaletrack
