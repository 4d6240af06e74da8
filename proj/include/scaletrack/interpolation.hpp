#pragma once

#include <cstddef>

#include "scaletrack/tensor.hpp"

namespace scaletrack {

/// Cubic convolution kernel on [-2, 2]. K(0) = 1 and K(+-1) = K(+-2) = 0 for
/// every alpha; alpha = -0.5 additionally reproduces linear ramps exactly.
struct InterpolationKernel {
    double alpha = -0.5;
    double operator()(double x) const;
};

/// Axis-aligned rectangle in continuous map coordinates. Cell j covers
/// [j, j + 1); x/y are the left/top edges.
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;

    double center_x() const { return x + 0.5 * width; }
    double center_y() const { return y + 0.5 * height; }
    static Rect centered(double cx, double cy, double w, double h) {
        return {cx - 0.5 * w, cy - 0.5 * h, w, h};
    }
};

/// Integer half-open window [row0, row1) x [col0, col1) selected by a crop.
/// May extend past the map; those cells replicate the nearest edge.
struct CropMask {
    long row0 = 0, row1 = 0, col0 = 0, col1 = 0;
    bool operator==(const CropMask&) const = default;
};

/// Crop operator: the continuous rectangle plus the binary window it selects.
/// Edges round half away from zero; windows of one cell or less grow to two.
struct CropOperator {
    Rect region;
    // Restrict interpolation taps to the mask window. When false, taps near
    // the rectangle edge read the neighbouring map cells instead, so the
    // result varies continuously with the rectangle.
    bool confine = true;

    CropMask mask() const;
    /// Binary rows x cols plane with ones inside the mask (clamped to the map).
    Tensor mask_plane(std::size_t rows, std::size_t cols) const;
};

/// Resamples every channel of `src` to rows x cols. Output sample i along an
/// axis of source length S sits at source coordinate (i + 0.5) * S / T - 0.5;
/// downsampling widens the kernel by S / T. Same-size resampling is the
/// identity.
Tensor resample(const Tensor& src, std::size_t rows, std::size_t cols,
                const InterpolationKernel& kernel = {});
FeatureMap resample(const FeatureMap& map, std::size_t rows, std::size_t cols,
                    const InterpolationKernel& kernel = {});

/// Selects the crop window (edge-replicating outside the map), then resamples
/// the continuous region onto rows x cols samples. Taps never reach outside
/// the window. For integer-aligned regions this equals resample() of the
/// extracted sub-array.
Tensor crop_and_resample(const Tensor& src, const CropOperator& crop, std::size_t rows,
                         std::size_t cols, const InterpolationKernel& kernel = {});
FeatureMap crop_and_resample(const FeatureMap& map, const CropOperator& crop, std::size_t rows,
                             std::size_t cols, const InterpolationKernel& kernel = {});
Frame crop_and_resample(const Frame& frame, const CropOperator& crop, std::size_t rows,
                        std::size_t cols, const InterpolationKernel& kernel = {});

} // namespace scaletrack
