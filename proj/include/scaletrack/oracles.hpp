#pragma once

// Brute-force reference implementations used to check the fast paths. Each
// one evaluates its definition directly (explicit sums, dense matrices) and
// shares no code with the library routines it checks.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scaletrack/tensor.hpp"

namespace scaletrack::oracle {

/// O(n^2) DFT; the inverse divides by n.
std::vector<cdouble> direct_dft(std::span<const cdouble> x, bool inverse = false);

/// out[t] = sum_n a[n] * b[(n + t) mod n], 2D, per channel, O(n^4).
Tensor direct_correlation_2d(const Tensor& a, const Tensor& b);

/// out[t] = sum_n a[n] * b[(t - n) mod D].
std::vector<double> direct_circular_convolution(std::span<const double> a, std::span<const double> b);

/// 0.5 * (1 - cos(2 pi n / (L - 1))) evaluated term by term.
std::vector<double> direct_hann(std::size_t length);

/// Scale dims a^b * (L, U) for b running over the symmetric level range,
/// evaluated by repeated multiplication.
struct DirectLevel {
    int level;
    double width, height;
};
std::vector<DirectLevel> direct_scale_levels(double width, double height, double step, std::size_t count);

/// Single-sample multi-channel ridge regression over the scale axis, solved
/// densely: minimise ||sum_k h_k (*) w_k - y||^2 + lambda * sum_k ||h_k||^2,
/// where (*) is circular convolution along the row. Rows of `filter` are h_k.
struct RidgeSolution {
    Eigen::MatrixXd filter;      // K x D
    Eigen::VectorXd prediction;  // sum_k h_k (*) w_k
};
RidgeSolution dense_ridge_regression(const Eigen::MatrixXd& sample, std::span<const double> label,
                                     double lambda);

/// Scale confidence from spatial filter rows: sum_k h_k (*) z_k.
std::vector<double> direct_scale_confidence(const Eigen::MatrixXd& filter_rows, const Eigen::MatrixXd& z);

/// Spatial filter rows from frequency-domain rows via the direct inverse DFT.
Eigen::MatrixXd spatial_rows(const Eigen::MatrixXcd& spectrum_rows);

/// Dense solve of the spatial-domain regularised least squares
///   sum_j a_j ||sum_c f_c (*) x_jc - y||^2 + lambda * sum_c ||w . f_c||^2
/// with (*) 2D circular convolution. Returns f (rows x cols x channels).
Tensor dense_translation_solve(const std::vector<Tensor>& samples, std::span<const double> weights,
                               const Tensor& label, const Tensor& spatial_weight, double lambda);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a);

/// Fraction of values <= threshold / > threshold, by explicit counting.
double fraction_at_most(std::span<const double> values, double threshold);
double fraction_above(std::span<const double> values, double threshold);

/// Deterministic uniform doubles in [lo, hi).
class Random {
public:
    explicit Random(std::uint64_t seed) : state_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0);
    std::size_t index(std::size_t lo, std::size_t hi);  // inclusive range
    Tensor tensor(std::size_t rows, std::size_t cols, std::size_t channels, double lo = -1.0, double hi = 1.0);

private:
    std::uint64_t next();
    std::uint64_t state_;
};

} // namespace scaletrack::oracle
