#include "scaletrack/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "scaletrack/errors.hpp"

namespace scaletrack {
namespace {

struct Tap {
    std::size_t index;
    double weight;
};

long round_half_away(double v) { return static_cast<long>(std::lround(v)); }

// Taps for every output sample along one axis.
std::vector<std::vector<Tap>> axis_taps(double origin, double extent, std::size_t out_len,
                                        long win0, long win1, std::size_t src_len,
                                        const InterpolationKernel& kernel) {
    const double step = extent / static_cast<double>(out_len);
    const double widen = std::max(1.0, step);
    const double support = 2.0 * widen;
    auto clamp_index = [&](long j) {
        j = std::clamp(j, win0, win1 - 1);
        return static_cast<std::size_t>(std::clamp<long>(j, 0, static_cast<long>(src_len) - 1));
    };

    std::vector<std::vector<Tap>> taps(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        const double u = origin + (static_cast<double>(i) + 0.5) * step - 0.5;
        const long first = static_cast<long>(std::floor(u - support)) + 1;
        const long last = static_cast<long>(std::ceil(u + support)) - 1;
        double total = 0.0;
        for (long j = first; j <= last; ++j) {
            const double w = kernel((u - static_cast<double>(j)) / widen);
            if (w == 0.0) continue;
            taps[i].push_back({clamp_index(j), w});
            total += w;
        }
        for (auto& t : taps[i]) t.weight /= total;
    }
    return taps;
}

Tensor apply_taps(const Tensor& src, const std::vector<std::vector<Tap>>& row_taps,
                  const std::vector<std::vector<Tap>>& col_taps) {
    const std::size_t rows = row_taps.size(), cols = col_taps.size();
    // Horizontal pass only over the source rows the vertical taps touch.
    std::size_t lo = src.rows(), hi = 0;
    for (const auto& taps : row_taps)
        for (const Tap& t : taps) {
            lo = std::min(lo, t.index);
            hi = std::max(hi, t.index);
        }
    Tensor tmp(src.rows(), cols, src.channels());
    for (std::size_t ch = 0; ch < src.channels(); ++ch)
        for (std::size_t r = lo; r <= hi; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                double s = 0.0;
                for (const Tap& t : col_taps[c]) s += t.weight * src(r, t.index, ch);
                tmp(r, c, ch) = s;
            }
    Tensor out(rows, cols, src.channels());
    for (std::size_t ch = 0; ch < src.channels(); ++ch)
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                double s = 0.0;
                for (const Tap& t : row_taps[r]) s += t.weight * tmp(t.index, c, ch);
                out(r, c, ch) = s;
            }
    return out;
}

} // namespace

double InterpolationKernel::operator()(double x) const {
    const double a = std::abs(x);
    if (a <= 1.0) return ((alpha + 2.0) * a - (alpha + 3.0)) * a * a + 1.0;
    if (a < 2.0) return ((alpha * a - 5.0 * alpha) * a + 8.0 * alpha) * a - 4.0 * alpha;
    return 0.0;
}

CropMask CropOperator::mask() const {
    CropMask m{round_half_away(region.y), round_half_away(region.y + region.height),
               round_half_away(region.x), round_half_away(region.x + region.width)};
    if (m.row1 - m.row0 <= 1) m.row1 = m.row0 + 2;
    if (m.col1 - m.col0 <= 1) m.col1 = m.col0 + 2;
    return m;
}

Tensor CropOperator::mask_plane(std::size_t rows, std::size_t cols) const {
    const CropMask m = mask();
    Tensor plane(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const auto ri = static_cast<long>(r), ci = static_cast<long>(c);
            if (ri >= m.row0 && ri < m.row1 && ci >= m.col0 && ci < m.col1) plane(r, c) = 1.0;
        }
    return plane;
}

Tensor resample(const Tensor& src, std::size_t rows, std::size_t cols,
                const InterpolationKernel& kernel) {
    if (src.empty()) throw InvalidInput("resample: empty source");
    const Rect full{0.0, 0.0, static_cast<double>(src.cols()), static_cast<double>(src.rows())};
    return crop_and_resample(src, CropOperator{full}, rows, cols, kernel);
}

FeatureMap resample(const FeatureMap& map, std::size_t rows, std::size_t cols,
                    const InterpolationKernel& kernel) {
    return {resample(map.data, rows, cols, kernel), map.stride};
}

Tensor crop_and_resample(const Tensor& src, const CropOperator& crop, std::size_t rows,
                         std::size_t cols, const InterpolationKernel& kernel) {
    if (rows == 0 || cols == 0) throw InvalidInput("resample: target dims must be positive");
    if (src.empty()) throw InvalidInput("crop: empty source");
    const Rect& r = crop.region;
    if (!(r.width > 0.0) || !(r.height > 0.0) || !std::isfinite(r.x) || !std::isfinite(r.y))
        throw InvalidInput("crop: degenerate rectangle");
    const CropMask m = crop.mask();
    if (m.row1 <= 0 || m.col1 <= 0 || m.row0 >= static_cast<long>(src.rows()) ||
        m.col0 >= static_cast<long>(src.cols()))
        throw InvalidInput("crop: rectangle lies entirely outside the map");

    const long lim_r = static_cast<long>(src.rows()), lim_c = static_cast<long>(src.cols());
    const auto row_taps = crop.confine
                              ? axis_taps(r.y, r.height, rows, m.row0, m.row1, src.rows(), kernel)
                              : axis_taps(r.y, r.height, rows, 0, lim_r, src.rows(), kernel);
    const auto col_taps = crop.confine
                              ? axis_taps(r.x, r.width, cols, m.col0, m.col1, src.cols(), kernel)
                              : axis_taps(r.x, r.width, cols, 0, lim_c, src.cols(), kernel);
    return apply_taps(src, row_taps, col_taps);
}

FeatureMap crop_and_resample(const FeatureMap& map, const CropOperator& crop, std::size_t rows,
                             std::size_t cols, const InterpolationKernel& kernel) {
    return {crop_and_resample(map.data, crop, rows, cols, kernel), map.stride};
}

Frame crop_and_resample(const Frame& frame, const CropOperator& crop, std::size_t rows,
                        std::size_t cols, const InterpolationKernel& kernel) {
    return Frame(crop_and_resample(frame.pixels(), crop, rows, cols, kernel));
}

} // namespace scaletrack
