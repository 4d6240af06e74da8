#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "scaletrack/newton.hpp"
#include "scaletrack/tensor.hpp"

namespace scaletrack {

struct TranslationParams {
    std::size_t basis_channels = 16;  // m
    double lambda = 0.1;              // weight of the spatial penalty
    double sigma_factor = 1.0 / 16.0; // label sigma = factor * sqrt(target area in cells)
    int cg_iterations_first = 60;
    int cg_iterations_update = 5;
    double cg_tolerance = 1e-4;       // relative residual reduction
    std::size_t memory_capacity = 30;
    double memory_decay = 0.025;
    // Spatial weight w(t) = base + gain * |t / half target size|^2, clipped.
    double weight_base = 1.0;
    double weight_gain = 3.0;
    double weight_clip = 100.0;
    int weight_coefficients = 5;      // retained DFT coefficients per axis
    bool uniform_weight = false;      // w == weight_base everywhere
    int newton_iterations = 5;
};

void validate(const TranslationParams& p);

/// G x m matrix whose orthonormal columns are the top-m principal directions
/// of the channel covariance of `features` (cells are the observations).
/// Column signs are fixed so the largest-magnitude entry is positive.
Eigen::MatrixXd learn_projection(const FeatureMap& features, std::size_t m);

/// Applies C^T per cell: G channels in, m channels out.
FeatureMap project(const FeatureMap& features, const Eigen::MatrixXd& projection);

/// Training samples with exponentially decaying weights.
class SampleMemory {
public:
    struct Entry {
        CTensor spectrum;  // projected, windowed sample
        double weight;
    };

    explicit SampleMemory(std::size_t capacity = 30, double decay = 0.025);

    /// Existing weights scale by (1 - decay), the new sample enters with
    /// weight decay (or 1 when the memory is empty), the lowest-weight entry
    /// is dropped beyond capacity, then weights renormalise to sum 1.
    void insert(CTensor spectrum);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t capacity() const { return capacity_; }
    double decay() const { return decay_; }

private:
    std::size_t capacity_;
    double decay_;
    std::vector<Entry> entries_;
};

/// Circularly wrapped spatial weight on a rows x cols grid with its minimum at
/// the origin, band-limited to the retained low-frequency coefficients and
/// lifted so its minimum equals weight_base.
Tensor make_spatial_weight(std::size_t rows, std::size_t cols, double target_rows,
                           double target_cols, const TranslationParams& p);

/// Spectrum of a 2D Gaussian peaked at (rows / 2, cols / 2).
CTensor make_translation_label(std::size_t rows, std::size_t cols, double sigma);

struct TranslationFilter {
    CTensor filter;              // response = IFFT(sum_c conj(filter_c) * X_c)
    Eigen::MatrixXd projection;  // G x m
    Tensor spatial_weight;
    CTensor label;
    double lambda = 0.1;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residuals;   // unpreconditioned residual norms, index 0 = start
    std::vector<double> objectives;  // objective after each iterate, index 0 = start
};

/// Objective value (data term over the weighted memory plus spatial penalty),
/// measured in the spatial domain.
double translation_objective(const SampleMemory& memory, const TranslationFilter& f);

/// Minimises the weighted objective over `f.filter` by preconditioned
/// conjugate gradients, warm-started from the current filter. Stops when the
/// residual falls by `tolerance` relative to the start or after
/// `max_iterations`. Throws NumericalFailure if the residual grows for five
/// consecutive iterations. Objective values are recorded only on request.
SolveReport learn_translation_filter(const SampleMemory& memory, TranslationFilter& f,
                                     int max_iterations, double tolerance,
                                     bool record_objective = false);

struct Localization {
    double row_offset = 0.0;  // cells, relative to the template centre
    double col_offset = 0.0;
    double score = 0.0;
    Tensor response;
};

/// Correlates the filter with a projected, windowed search spectrum and
/// refines the peak. Throws DegenerateResponse for an all-zero response.
Localization localize(const TranslationFilter& f, const CTensor& search_spectrum,
                      int newton_iterations);

/// Circular shift in the frequency domain: the result samples the input at
/// t + (dy, dx).
void shift_spectrum(CTensor& spectrum, double dy, double dx);

/// Translation filter bound to one template geometry: windowing, projection,
/// memory management and learning.
class TranslationModel {
public:
    TranslationModel(TranslationParams params, std::size_t rows, std::size_t cols,
                     double target_rows, double target_cols);

    /// Learns the projection from the first sample and solves the first
    /// filter with the first-frame iteration budget.
    SolveReport init(const FeatureMap& raw_features);

    /// Window, project and transform a raw feature map of template size.
    CTensor prepare(const FeatureMap& raw_features) const;

    Localization detect(const CTensor& prepared) const;

    /// Adds a prepared sample and refines the filter.
    SolveReport update(CTensor prepared);

    const TranslationFilter& filter() const { return filter_; }
    const SampleMemory& memory() const { return memory_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    TranslationParams params_;
    std::size_t rows_, cols_;
    Tensor window_;
    TranslationFilter filter_;
    SampleMemory memory_;
};

} // namespace scaletrack
