#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "scaletrack/dataset.hpp"

namespace scaletrack {

enum class SynthKind { still, zoom, drift, zoom_drift };

const char* to_string(SynthKind k);
SynthKind parse_synth_kind(const std::string& s);

struct SynthParams {
    SynthKind kind = SynthKind::still;
    std::size_t width = 320, height = 240;  // frame size, pixels
    double object_width = 50.0, object_height = 50.0;  // first-frame size
    std::size_t frames = 30;
    double zoom_rate = 1.02;              // size factor per frame (zoom kinds)
    double drift_x = 2.0, drift_y = 0.0;  // pixels per frame (drift kinds)
    std::uint64_t seed = 1;
};

void validate(const SynthParams& p);

/// Renders a textured rectangle over a textured background, with
/// area-weighted edge coverage, plus exact ground truth. The object texture
/// is attached to the object and scales with it. Frame t (0-based) has size
/// object * rate^t and centre start + t * drift, starting at the frame
/// centre. Grayscale, deterministic in the seed.
Sequence synth_sequence(const SynthParams& p);

} // namespace scaletrack
