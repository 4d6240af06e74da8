#include "scaletrack/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "scaletrack/errors.hpp"

namespace scaletrack {

bool all_finite(const Tensor& t) {
    return std::all_of(t.values().begin(), t.values().end(),
                       [](double v) { return std::isfinite(v); });
}

double squared_norm(const Tensor& t) {
    double s = 0.0;
    for (double v : t.values()) s += v * v;
    return s;
}

double squared_norm(const CTensor& t) {
    double s = 0.0;
    for (const cdouble& v : t.values()) s += std::norm(v);
    return s;
}

Frame::Frame(Tensor pixels) : pixels_(std::move(pixels)) {
    if (pixels_.empty()) throw InvalidInput("frame: empty pixel array");
    if (pixels_.channels() != 1 && pixels_.channels() != 3)
        throw InvalidInput("frame: channel count must be 1 or 3");
    if (!all_finite(pixels_)) throw InvalidInput("frame: non-finite pixel value");
}

void validate(const FeatureMap& map) {
    if (map.data.empty() || map.channels() < 1) throw InvalidInput("feature map: no channels");
    if (!(map.stride >= 1.0)) throw InvalidInput("feature map: stride must be >= 1");
    if (!all_finite(map.data)) throw InvalidInput("feature map: non-finite value");
}

} // namespace scaletrack
