#include "scaletrack/hog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scaletrack/errors.hpp"

namespace scaletrack {
namespace {

constexpr double kTextureWeight = 0.2357;

struct Gradient {
    double magnitude;
    double angle;  // [0, 2 pi)
};

Gradient pixel_gradient(const Tensor& img, std::size_t r, std::size_t c) {
    const std::size_t rows = img.rows(), cols = img.cols();
    Gradient best{0.0, 0.0};
    for (std::size_t ch = 0; ch < img.channels(); ++ch) {
        double gx = 0.0, gy = 0.0;
        if (cols > 1) {
            if (c == 0) gx = img(r, 1, ch) - img(r, 0, ch);
            else if (c + 1 == cols) gx = img(r, c, ch) - img(r, c - 1, ch);
            else gx = 0.5 * (img(r, c + 1, ch) - img(r, c - 1, ch));
        }
        if (rows > 1) {
            if (r == 0) gy = img(1, c, ch) - img(0, c, ch);
            else if (r + 1 == rows) gy = img(r, c, ch) - img(r - 1, c, ch);
            else gy = 0.5 * (img(r + 1, c, ch) - img(r - 1, c, ch));
        }
        const double mag = std::hypot(gx, gy);
        if (mag > best.magnitude) {
            double a = std::atan2(gy, gx);
            if (a < 0) a += 2.0 * std::numbers::pi;
            best = {mag, a};
        }
    }
    return best;
}

} // namespace

void validate(const HogConfig& cfg) {
    if (cfg.cell_size < 1) throw InvalidInput("hog: cell size must be >= 1");
    if (cfg.orientations < 2) throw InvalidInput("hog: need at least 2 orientation bins");
    if (!(cfg.epsilon > 0.0)) throw InvalidInput("hog: epsilon must be positive");
    if (cfg.channels != 3 * cfg.orientations + 4)
        throw InvalidInput("hog: channel count must equal 3 * orientations + 4");
}

FeatureMap hog_extract(const Frame& patch, const HogConfig& cfg) {
    validate(cfg);
    const auto cell = static_cast<std::size_t>(cfg.cell_size);
    const Tensor& img = patch.pixels();
    if (img.rows() < cell || img.cols() < cell)
        throw InvalidInput("hog: patch smaller than one cell");

    const std::size_t cr = img.rows() / cell, cc = img.cols() / cell;
    const std::size_t signed_bins = 2 * static_cast<std::size_t>(cfg.orientations);
    const double bin_width = std::numbers::pi / cfg.orientations;

    // Orientation histograms with bilinear spatial voting between cell centres.
    Tensor hist(cr, cc, signed_bins);
    for (std::size_t r = 0; r < img.rows(); ++r) {
        const double yp = (static_cast<double>(r) + 0.5) / static_cast<double>(cell) - 0.5;
        const auto iy = static_cast<long>(std::floor(yp));
        const double wy1 = yp - static_cast<double>(iy), wy0 = 1.0 - wy1;
        for (std::size_t c = 0; c < img.cols(); ++c) {
            const Gradient g = pixel_gradient(img, r, c);
            if (g.magnitude == 0.0) continue;
            const auto bin =
                static_cast<std::size_t>(std::lround(g.angle / bin_width)) % signed_bins;
            const double xp = (static_cast<double>(c) + 0.5) / static_cast<double>(cell) - 0.5;
            const auto ix = static_cast<long>(std::floor(xp));
            const double wx1 = xp - static_cast<double>(ix), wx0 = 1.0 - wx1;
            const long cells_r = static_cast<long>(cr), cells_c = static_cast<long>(cc);
            auto vote = [&](long y, long x, double w) {
                if (y >= 0 && y < cells_r && x >= 0 && x < cells_c)
                    hist(static_cast<std::size_t>(y), static_cast<std::size_t>(x), bin) +=
                        w * g.magnitude;
            };
            vote(iy, ix, wy0 * wx0);
            vote(iy, ix + 1, wy0 * wx1);
            vote(iy + 1, ix, wy1 * wx0);
            vote(iy + 1, ix + 1, wy1 * wx1);
        }
    }

    // Per-cell gradient energy of the contrast-insensitive histogram.
    const std::size_t half = static_cast<std::size_t>(cfg.orientations);
    Tensor energy(cr, cc);
    for (std::size_t r = 0; r < cr; ++r)
        for (std::size_t c = 0; c < cc; ++c) {
            double e = 0.0;
            for (std::size_t o = 0; o < half; ++o) {
                const double v = hist(r, c, o) + hist(r, c, o + half);
                e += v * v;
            }
            energy(r, c) = e;
        }

    auto clamp_idx = [](long i, std::size_t n) {
        return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
    };

    FeatureMap out{Tensor(cr, cc, static_cast<std::size_t>(cfg.channels)),
                   static_cast<double>(cell)};
    for (std::size_t r = 0; r < cr; ++r) {
        for (std::size_t c = 0; c < cc; ++c) {
            // One normaliser per 2x2 block that contains this cell.
            double norm[4];
            int k = 0;
            for (long dr = -1; dr <= 0; ++dr)
                for (long dc = -1; dc <= 0; ++dc) {
                    double s = 0.0;
                    for (long i = 0; i < 2; ++i)
                        for (long j = 0; j < 2; ++j)
                            s += energy(clamp_idx(static_cast<long>(r) + dr + i, cr),
                                        clamp_idx(static_cast<long>(c) + dc + j, cc));
                    norm[k++] = 1.0 / std::sqrt(s + cfg.epsilon);
                }

            double texture[4] = {0, 0, 0, 0};
            for (std::size_t o = 0; o < signed_bins; ++o) {
                double sum = 0.0;
                for (int b = 0; b < 4; ++b) {
                    const double h = std::min(hist(r, c, o) * norm[b], cfg.clip);
                    sum += h;
                    texture[b] += h;
                }
                out.data(r, c, o) = 0.5 * sum;
            }
            for (std::size_t o = 0; o < half; ++o) {
                const double v = hist(r, c, o) + hist(r, c, o + half);
                double sum = 0.0;
                for (int b = 0; b < 4; ++b) sum += std::min(v * norm[b], cfg.clip);
                out.data(r, c, signed_bins + o) = 0.5 * sum;
            }
            for (std::size_t b = 0; b < 4; ++b)
                out.data(r, c, signed_bins + half + b) = kTextureWeight * texture[b];
        }
    }
    return out;
}

} // namespace scaletrack
