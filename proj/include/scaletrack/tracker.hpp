#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "scaletrack/config.hpp"
#include "scaletrack/geometry.hpp"
#include "scaletrack/provider.hpp"
#include "scaletrack/scale.hpp"
#include "scaletrack/translation.hpp"

namespace scaletrack {

struct TargetState {
    double cx = 0.0, cy = 0.0;         // pixels
    double width = 0.0, height = 0.0;  // pixels
    double scale = 1.0;                // size relative to the init box
    std::size_t frame = 0;             // 1-based index of the last processed frame

    Box box() const { return Box::from_center(cx, cy, width, height); }
};

struct FrameResult {
    Box box;
    double score = 0.0;
    bool low_confidence = false;
};

struct TrackResult {
    std::vector<Box> boxes;
    std::vector<double> scores;
    std::vector<bool> low_confidence;
    std::vector<double> frame_seconds;
    double fps = 0.0;
};

/// Single-target tracker: translation filter on a padded search window plus
/// a scale filter built with the configured sampling method. Each frame
/// detects translation at the previous scale, detects scale at the new
/// centre, updates the state, then updates both models.
class Tracker {
public:
    /// The provider must outlive the tracker.
    Tracker(TrackerConfig cfg, FeatureProvider& provider);

    void init(const Frame& frame, const Box& box);
    FrameResult step(const Frame& frame);

    /// Translation detection at the current state without any update.
    Localization localize(const Frame& frame);

    const TrackerConfig& config() const { return cfg_; }
    const TargetState& state() const { return state_; }
    const TranslationModel& translation() const { return *translation_; }
    const ScaleEstimator& scale() const { return *scale_; }
    std::size_t template_rows() const { return rows_; }
    std::size_t template_cols() const { return cols_; }
    /// Image pixels per template cell at the init scale.
    double cell_pixels() const { return cell_px_; }

private:
    FeatureMap search_features(FrameFeatures& features) const;
    bool shares_features() const;
    void require_initialized() const;

    TrackerConfig cfg_;
    FeatureProvider& provider_;
    TargetState state_;
    std::size_t frame_width_ = 0, frame_height_ = 0;
    double base_width_ = 0.0, base_height_ = 0.0;
    double min_scale_ = 0.0, max_scale_ = 0.0;
    std::size_t rows_ = 0, cols_ = 0;
    double cell_px_ = 0.0;
    double layer_stride_ = 1.0;
    std::optional<TranslationModel> translation_;
    std::optional<ScaleEstimator> scale_;
};

using FrameSource = std::function<Frame(std::size_t)>;

/// Init on frame 0, step through the rest. The first box is the init box.
TrackResult track_sequence(std::size_t frame_count, const FrameSource& frame_at, const Box& init,
                           const TrackerConfig& cfg, FeatureProvider& provider);

} // namespace scaletrack
