#include "scaletrack/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "scaletrack/errors.hpp"
#include "scaletrack/interpolation.hpp"

namespace scaletrack {
namespace {

FeatureMap concat_channels(const std::vector<FeatureMap>& maps, std::size_t rows, std::size_t cols) {
    std::size_t channels = 0;
    for (const auto& m : maps) channels += m.data.channels();
    FeatureMap out{Tensor(rows, cols, channels), maps.front().stride};
    std::size_t ch = 0;
    for (const auto& m : maps) {
        const FeatureMap fitted = (m.data.rows() == rows && m.data.cols() == cols)
                                      ? m
                                      : resample(m, rows, cols);
        for (std::size_t c = 0; c < fitted.data.channels(); ++c, ++ch) {
            const auto src = fitted.data.channel(c);
            std::copy(src.begin(), src.end(), out.data.channel(ch).begin());
        }
    }
    return out;
}

} // namespace

Tracker::Tracker(TrackerConfig cfg, FeatureProvider& provider)
    : cfg_(std::move(cfg)), provider_(provider) {
    validate(cfg_);
    const auto& desc = provider_.descriptor();
    for (const auto& id : cfg_.translation_layers)
        if (!desc.find(id)) throw ContractError("tracker: provider has no layer '" + id + "'");
    if (!desc.find(cfg_.scale_layer))
        throw ContractError("tracker: provider has no layer '" + cfg_.scale_layer + "'");
    layer_stride_ = desc.find(cfg_.translation_layers.front())->stride;
}

bool Tracker::shares_features() const {
    return cfg_.share_frame_features && cfg_.method == ScaleMethod::hrsem &&
           cfg_.translation_layers.size() == 1 && cfg_.translation_layers.front() == cfg_.scale_layer;
}

void Tracker::require_initialized() const {
    if (!translation_) throw ContractError("tracker: step before init");
}

void Tracker::init(const Frame& frame, const Box& box) {
    const double fw = static_cast<double>(frame.width());
    const double fh = static_cast<double>(frame.height());
    if (!(std::isfinite(box.x) && std::isfinite(box.y) && box.width > 0.0 && box.height > 0.0))
        throw InvalidInput("tracker: init box must be finite with positive size");
    if (box.area() < 4.0) throw InvalidInput("tracker: init box area below 4 px^2");
    if (box.center_x() < 0.0 || box.center_x() > fw || box.center_y() < 0.0 || box.center_y() > fh)
        throw InvalidInput("tracker: init box centre lies outside the frame");

    frame_width_ = frame.width();
    frame_height_ = frame.height();
    base_width_ = box.width;
    base_height_ = box.height;
    min_scale_ = cfg_.min_target_size / std::min(box.width, box.height);
    max_scale_ = std::max(1.0, std::min(fw / box.width, fh / box.height));
    state_ = {box.center_x(), box.center_y(), box.width, box.height, 1.0, 1};

    // Search window: padding times the target area, resampled so the cell
    // count stays within the configured bounds.
    const double side = std::sqrt(cfg_.padding);
    const double win_w = side * box.width, win_h = side * box.height;
    const double cells = win_w * win_h / (layer_stride_ * layer_stride_);
    const double bounded = std::clamp(cells, cfg_.min_search_cells, cfg_.max_search_cells);
    cell_px_ = layer_stride_ * std::sqrt(cells / bounded);
    rows_ = std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(win_h / cell_px_)));
    cols_ = std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(win_w / cell_px_)));

    translation_.emplace(cfg_.translation, rows_, cols_, box.height / cell_px_, box.width / cell_px_);
    scale_.emplace(cfg_.method, cfg_.scale, provider_, cfg_.scale_layer, box.width, box.height);

    FrameFeatures features(frame, provider_, cfg_.scale_layer);
    translation_->init(search_features(features));
    scale_->init(features, {state_.cx, state_.cy, state_.width, state_.height});
}

FeatureMap Tracker::search_features(FrameFeatures& features) const {
    const double cell = cell_px_ * state_.scale;
    const Rect window = Rect::centered(state_.cx, state_.cy, cell * static_cast<double>(cols_),
                                       cell * static_cast<double>(rows_));
    if (shares_features()) {
        const FeatureMap& full = features.full();
        const double s = full.stride;
        const CropOperator crop{{window.x / s, window.y / s, window.width / s, window.height / s}};
        return crop_and_resample(full, crop, rows_, cols_);
    }
    const auto patch_rows = static_cast<std::size_t>(std::lround(static_cast<double>(rows_) * layer_stride_));
    const auto patch_cols = static_cast<std::size_t>(std::lround(static_cast<double>(cols_) * layer_stride_));
    const Frame patch = crop_and_resample(features.frame(), CropOperator{window}, patch_rows, patch_cols);
    return concat_channels(provider_.extract(patch, cfg_.translation_layers), rows_, cols_);
}

Localization Tracker::localize(const Frame& frame) {
    require_initialized();
    FrameFeatures features(frame, provider_, cfg_.scale_layer);
    return translation_->detect(translation_->prepare(search_features(features)));
}

FrameResult Tracker::step(const Frame& frame) {
    require_initialized();
    if (frame.width() != frame_width_ || frame.height() != frame_height_)
        throw InvalidInput("tracker: frame size differs from the init frame");
    ++state_.frame;
    FrameFeatures features(frame, provider_, cfg_.scale_layer);

    CTensor prepared = translation_->prepare(search_features(features));
    Localization loc;
    try {
        loc = translation_->detect(prepared);
    } catch (const DegenerateResponse&) {
        return {state_.box(), 0.0, true};
    }
    const double cell = cell_px_ * state_.scale;
    const TargetState previous = state_;
    state_.cx = std::clamp(state_.cx + loc.col_offset * cell, 0.0, static_cast<double>(frame_width_));
    state_.cy = std::clamp(state_.cy + loc.row_offset * cell, 0.0, static_cast<double>(frame_height_));

    ScaleResponse sr;
    try {
        sr = scale_->detect(features, {state_.cx, state_.cy, state_.width, state_.height});
    } catch (const DegenerateResponse&) {
        state_ = previous;
        return {state_.box(), loc.score, true};
    }
    const double scale = std::clamp(state_.scale * sr.factor, min_scale_, max_scale_);
    state_.scale = scale;
    state_.width = base_width_ * scale;
    state_.height = base_height_ * scale;

    bool low_confidence = false;
    shift_spectrum(prepared, loc.row_offset, loc.col_offset);
    try {
        translation_->update(std::move(prepared));
    } catch (const NumericalFailure&) {
        low_confidence = true;
    }
    scale_->update(features, {state_.cx, state_.cy, state_.width, state_.height}, sr.level);
    return {state_.box(), loc.score, low_confidence};
}

TrackResult track_sequence(std::size_t frame_count, const FrameSource& frame_at, const Box& init,
                           const TrackerConfig& cfg, FeatureProvider& provider) {
    if (frame_count == 0) throw InvalidInput("track_sequence: need at least one frame");
    using Clock = std::chrono::steady_clock;
    TrackResult result;
    Tracker tracker(cfg, provider);

    auto start = Clock::now();
    tracker.init(frame_at(0), init);
    result.boxes.push_back(init);
    result.scores.push_back(1.0);
    result.low_confidence.push_back(false);
    result.frame_seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());

    for (std::size_t t = 1; t < frame_count; ++t) {
        start = Clock::now();
        const FrameResult r = tracker.step(frame_at(t));
        result.frame_seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());
        result.boxes.push_back(r.box);
        result.scores.push_back(r.score);
        result.low_confidence.push_back(r.low_confidence);
    }
    double total = 0.0;
    for (double s : result.frame_seconds) total += s;
    result.fps = total > 0.0 ? static_cast<double>(frame_count) / total : 0.0;
    return result;
}

} // namespace scaletrack
