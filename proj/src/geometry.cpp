#include "scaletrack/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "scaletrack/errors.hpp"

namespace scaletrack {
namespace {

void require_positive(const Box& b) {
    if (!(b.width > 0.0 && b.height > 0.0)) throw InvalidInput("box must have positive area");
}

} // namespace

double iou(const Box& a, const Box& b) {
    require_positive(a);
    require_positive(b);
    const double iw = std::min(a.x + a.width, b.x + b.width) - std::max(a.x, b.x);
    const double ih = std::min(a.y + a.height, b.y + b.height) - std::max(a.y, b.y);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    return inter / (a.area() + b.area() - inter);
}

double center_error(const Box& a, const Box& b) {
    require_positive(a);
    require_positive(b);
    return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

} // namespace scaletrack
