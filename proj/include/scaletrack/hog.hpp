#pragma once

#include "scaletrack/tensor.hpp"

namespace scaletrack {

struct HogConfig {
    int cell_size = 4;
    int orientations = 9;  // contrast-insensitive bins; signed bins are twice this
    int channels = 31;     // 3 * orientations + 4 texture channels
    double clip = 0.2;
    double epsilon = 1e-4;
};

void validate(const HogConfig& cfg);

/// Felzenszwalb-style compressed HOG. Output is floor(H/cell) x floor(W/cell)
/// x (3 * orientations + 4) with stride = cell size. Multi-channel frames use
/// the channel with the largest gradient magnitude at each pixel.
FeatureMap hog_extract(const Frame& patch, const HogConfig& cfg = {});

} // namespace scaletrack
