#pragma once

namespace scaletrack {

/// Axis-aligned box: top-left corner plus size, pixels.
struct Box {
    double x = 0.0, y = 0.0, width = 0.0, height = 0.0;

    double center_x() const { return x + 0.5 * width; }
    double center_y() const { return y + 0.5 * height; }
    double area() const { return width * height; }
    bool operator==(const Box&) const = default;

    static Box from_center(double cx, double cy, double w, double h) {
        return {cx - 0.5 * w, cy - 0.5 * h, w, h};
    }
};

/// Intersection over union; throws InvalidInput for non-positive areas.
double iou(const Box& a, const Box& b);

/// Euclidean distance between box centres; same preconditions as iou.
double center_error(const Box& a, const Box& b);

} // namespace scaletrack
