#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scaletrack/hog.hpp"
#include "scaletrack/newton.hpp"
#include "scaletrack/provider.hpp"
#include "scaletrack/tensor.hpp"

namespace scaletrack {

// ---------------------------------------------------------------------------
// Scale pyramid

struct ScaleLevel {
    int level = 0;        // b
    double factor = 1.0;  // a^b
    double width = 0.0;   // a^b * L, pixels, unrounded
    double height = 0.0;  // a^b * U
};

struct ScaleSet {
    double step = 1.02;  // a
    std::vector<ScaleLevel> levels;  // ascending b

    std::size_t size() const { return levels.size(); }
    int min_level() const { return levels.front().level; }
    int max_level() const { return levels.back().level; }
    /// Index of level b = 0.
    std::size_t center_index() const { return static_cast<std::size_t>(-min_level()); }
};

/// Levels b = floor(-(D-1)/2) ... floor((D-1)/2) with dims a^b * (L, U).
ScaleSet build_scale_set(double width, double height, double step, std::size_t count);

// ---------------------------------------------------------------------------
// Multi-scale samples

/// K_f x D matrix, column d = vectorised features at level d. Rows run down
/// each spatial column, then across columns, then across channels.
using ScaleSample = Eigen::MatrixXd;

/// Vectorisation used for scale samples: index = (ch * cols + col) * rows + row.
Eigen::VectorXd vectorize(const FeatureMap& map);

/// Centre and size of the target in image pixels.
struct TargetGeometry {
    double cx = 0.0, cy = 0.0;
    double width = 0.0, height = 0.0;
};

/// Holistic sample: every level is cropped from one full-frame feature map
/// and resampled to canonical_rows x canonical_cols cells.
ScaleSample hrsem_sample(const FeatureMap& full_frame, double frame_width, double frame_height,
                         const TargetGeometry& target, const ScaleSet& scales,
                         std::size_t canonical_rows, std::size_t canonical_cols);

/// The D image regions of a region-based sample, each resampled to
/// input_rows x input_cols pixels.
FrameBatch region_batch(const Frame& frame, const TargetGeometry& target, const ScaleSet& scales,
                        std::size_t input_rows, std::size_t input_cols);

/// Region-based sample: one batched provider call over region_batch().
ScaleSample rrsem_sample(const Frame& frame, const TargetGeometry& target, const ScaleSet& scales,
                         FeatureProvider& provider, const std::string& layer,
                         std::size_t input_rows, std::size_t input_cols);

/// Baseline sample: one provider call per level over the same regions.
ScaleSample dsst_sample(const Frame& frame, const TargetGeometry& target, const ScaleSet& scales,
                        FeatureProvider& provider, const std::string& layer,
                        std::size_t input_rows, std::size_t input_cols);

/// Multiplies column d by the interior of a length D+2 Hann window, so no
/// level is zeroed.
ScaleSample taper_scale_axis(const ScaleSample& sample);

// ---------------------------------------------------------------------------
// Closed-form learning, detection and update

/// Gaussian over level index with its unit peak at the b = 0 index,
/// measured with circular distance.
std::vector<double> make_scale_label(std::size_t count, double sigma);

/// Row-wise FFT along the scale axis.
Eigen::MatrixXcd scale_spectrum(const ScaleSample& sample);

/// Running terms of the scale filter. The filter is numerator / denominator,
/// column by column; the denominator is shared by all feature rows and
/// already includes lambda.
struct ScaleFilter {
    Eigen::MatrixXcd numerator;   // conj(W) * Y
    Eigen::VectorXd denominator;  // sum_k |W_k|^2 + lambda
    double lambda = 1e-2;

    Eigen::MatrixXcd filter() const;
    std::size_t rows() const { return static_cast<std::size_t>(numerator.rows()); }
    std::size_t levels() const { return static_cast<std::size_t>(numerator.cols()); }
};

/// Terms for a label given as spatial values.
ScaleFilter learn_scale_filter(const ScaleSample& sample, std::span<const double> label,
                               double lambda);
/// Terms for a label given by its spectrum.
ScaleFilter learn_scale_filter(const ScaleSample& sample, const Eigen::VectorXcd& label_spectrum,
                               double lambda);

/// Blends running terms: (1 - eta) * old + eta * new.
void update_scale_model(ScaleFilter& model, const ScaleFilter& fresh, double eta);

/// Confidence over levels: real(IFFT(sum_rows filter_row * Z_row)).
std::vector<double> scale_confidence(const ScaleFilter& filter, const ScaleSample& z);

/// Continuous index of the confidence maximum (Newton on the trigonometric
/// interpolant). Single-level input returns 0.
double refine_scale(std::span<const double> confidence, int iterations);

struct ScaleResponse {
    std::vector<double> confidence;
    double level = 0.0;   // refined b*
    double factor = 1.0;  // a^{b*}
};

ScaleResponse detect_scale(const ScaleFilter& filter, const ScaleSample& z, const ScaleSet& scales,
                           int newton_iterations);

/// Label spectrum delayed by `shift` levels (fractional shifts allowed).
Eigen::VectorXcd shift_label_spectrum(const Eigen::VectorXcd& label_spectrum, double shift);

// ---------------------------------------------------------------------------
// Per-tracker scale estimator

enum class ScaleMethod { hrsem, rrsem, dsst };

const char* to_string(ScaleMethod m);
ScaleMethod parse_scale_method(const std::string& s);

struct ScaleParams {
    double step = 1.02;          // a
    std::size_t levels = 17;     // D
    double learning_rate = 0.025;  // eta
    double sigma = 1.0625;       // label sigma, scale steps
    int newton_iterations = 5;
    double lambda = 1e-2;
    double max_template_cells = 1024.0;  // HRSEM/RRSEM canonical area bound
    double dsst_max_area = 512.0;        // baseline template area bound, pixels
};

void validate(const ScaleParams& p);

/// Per-frame source of the full-frame feature map. Extracts at most once.
class FrameFeatures {
public:
    FrameFeatures(const Frame& frame, FeatureProvider& provider, std::string layer)
        : frame_(frame), provider_(provider), layer_(std::move(layer)) {}

    const Frame& frame() const { return frame_; }
    const FeatureMap& full();

private:
    const Frame& frame_;
    FeatureProvider& provider_;
    std::string layer_;
    std::optional<FeatureMap> full_;
};

/// Scale model of one tracker: builds samples with the configured method and
/// runs the closed-form learn / detect / update cycle.
class ScaleEstimator {
public:
    /// `base` is the first-frame target size in pixels; it fixes the template.
    ScaleEstimator(ScaleMethod method, ScaleParams params, FeatureProvider& provider,
                   std::string layer, double base_width, double base_height);

    /// Learns the first model (replaces any previous terms).
    void init(FrameFeatures& frame, const TargetGeometry& target);

    /// Scale response at `target` (new centre, previous size).
    ScaleResponse detect(FrameFeatures& frame, const TargetGeometry& target);

    /// Learns fresh terms at the updated target and blends them in. For
    /// RRSEM this reuses the batch from detect() with the label moved to the
    /// detected level, so each frame costs one batched extraction.
    void update(FrameFeatures& frame, const TargetGeometry& target, double detected_level);

    ScaleMethod method() const { return method_; }
    const ScaleParams& params() const { return params_; }
    const ScaleFilter& model() const { return model_; }
    std::size_t template_rows() const { return template_rows_; }
    std::size_t template_cols() const { return template_cols_; }
    std::size_t input_rows() const { return input_rows_; }
    std::size_t input_cols() const { return input_cols_; }

    /// Raw (untapered) sample of the configured method.
    ScaleSample sample(FrameFeatures& frame, const TargetGeometry& target);

private:
    ScaleFilter learn(const ScaleSample& raw, double label_shift) const;

    ScaleMethod method_;
    ScaleParams params_;
    FeatureProvider& provider_;
    std::string layer_;
    std::size_t template_rows_ = 0, template_cols_ = 0;  // canonical cells
    std::size_t input_rows_ = 0, input_cols_ = 0;        // region pixels (RRSEM / DSST)
    Eigen::VectorXcd label_spectrum_;
    ScaleFilter model_;
    std::optional<ScaleSample> last_detect_sample_;
};

} // namespace scaletrack
