#include "scaletrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "scaletrack/errors.hpp"

namespace scaletrack {
namespace {

constexpr std::size_t kTextureCells = 8;  // object texture grid per side

// Uniform [0, 1) from the raw engine output; avoids library-specific
// distribution implementations so renders match everywhere.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Texture {
    std::size_t n = 0;
    std::vector<double> v;  // n x n lattice values

    // Bilinear sample at continuous lattice coordinates, clamped at the edges.
    double at(double y, double x) const {
        y = std::clamp(y, 0.0, static_cast<double>(n - 1));
        x = std::clamp(x, 0.0, static_cast<double>(n - 1));
        const auto y0 = std::min(static_cast<std::size_t>(y), n - 2);
        const auto x0 = std::min(static_cast<std::size_t>(x), n - 2);
        const double fy = y - static_cast<double>(y0), fx = x - static_cast<double>(x0);
        const auto idx = [&](std::size_t r, std::size_t c) { return v[r * n + c]; };
        return (1 - fy) * ((1 - fx) * idx(y0, x0) + fx * idx(y0, x0 + 1)) +
               fy * ((1 - fx) * idx(y0 + 1, x0) + fx * idx(y0 + 1, x0 + 1));
    }
};

Texture random_texture(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    Texture t{n, std::vector<double>(n * n)};
    for (double& x : t.v) x = lo + (hi - lo) * unit(rng);
    return t;
}

// Length of [a, a + 1) covered by [lo, hi).
double overlap(double a, double lo, double hi) {
    return std::max(0.0, std::min(a + 1.0, hi) - std::max(a, lo));
}

} // namespace

const char* to_string(SynthKind k) {
    switch (k) {
    case SynthKind::still: return "static";
    case SynthKind::zoom: return "zoom";
    case SynthKind::drift: return "drift";
    case SynthKind::zoom_drift: return "zoom+drift";
    }
    return "?";
}

SynthKind parse_synth_kind(const std::string& s) {
    if (s == "static") return SynthKind::still;
    if (s == "zoom") return SynthKind::zoom;
    if (s == "drift") return SynthKind::drift;
    if (s == "zoom+drift") return SynthKind::zoom_drift;
    throw InvalidInput("unknown synthetic sequence kind '" + s + "'");
}

namespace {

Box box_at(const SynthParams& p, std::size_t t) {
    const bool zooms = p.kind == SynthKind::zoom || p.kind == SynthKind::zoom_drift;
    const bool drifts = p.kind == SynthKind::drift || p.kind == SynthKind::zoom_drift;
    const double f = zooms ? std::pow(p.zoom_rate, static_cast<double>(t)) : 1.0;
    const double tt = static_cast<double>(t);
    const double cx = 0.5 * static_cast<double>(p.width) + (drifts ? tt * p.drift_x : 0.0);
    const double cy = 0.5 * static_cast<double>(p.height) + (drifts ? tt * p.drift_y : 0.0);
    return Box::from_center(cx, cy, f * p.object_width, f * p.object_height);
}

} // namespace

void validate(const SynthParams& p) {
    if (p.width < 16 || p.height < 16) throw InvalidInput("synth: frame must be at least 16x16");
    if (p.frames < 1) throw InvalidInput("synth: need at least one frame");
    if (!(p.object_width >= 2.0 && p.object_height >= 2.0)) throw InvalidInput("synth: object too small");
    if (!(p.zoom_rate > 0.0) || !std::isfinite(p.drift_x) || !std::isfinite(p.drift_y))
        throw InvalidInput("synth: invalid motion parameters");
    for (std::size_t t = 0; t < p.frames; ++t) {
        const Box b = box_at(p, t);
        if (b.width > static_cast<double>(p.width) || b.height > static_cast<double>(p.height))
            throw InvalidInput("synth: object larger than frame at frame " + std::to_string(t));
        if (b.x < 0.0 || b.y < 0.0 || b.x + b.width > static_cast<double>(p.width) ||
            b.y + b.height > static_cast<double>(p.height))
            throw InvalidInput("synth: object leaves the frame at frame " + std::to_string(t));
    }
}

Sequence synth_sequence(const SynthParams& p) {
    validate(p);
    std::mt19937_64 rng(p.seed);
    // Background: coarse low-contrast lattice (one node per 16 px); object:
    // high-contrast lattice plus a dark rim so its outline stays visible.
    const std::size_t bg_n = std::max(p.width, p.height) / 16 + 2;
    const Texture background = random_texture(rng, bg_n, 70.0, 150.0);
    const Texture object = random_texture(rng, kTextureCells, 0.0, 255.0);

    Tensor bg(p.height, p.width, 1);
    for (std::size_t r = 0; r < p.height; ++r)
        for (std::size_t c = 0; c < p.width; ++c)
            bg(r, c, 0) = background.at((static_cast<double>(r) + 0.5) / 16.0,
                                        (static_cast<double>(c) + 0.5) / 16.0);

    Sequence seq;
    seq.name = std::string("synthetic-") + to_string(p.kind);
    if (p.kind == SynthKind::zoom || p.kind == SynthKind::zoom_drift) seq.attributes.push_back("SV");
    for (std::size_t t = 0; t < p.frames; ++t) {
        const Box b = box_at(p, t);
        Tensor img = bg;
        const auto r0 = static_cast<std::size_t>(std::max(0.0, std::floor(b.y)));
        const auto r1 = std::min(p.height, static_cast<std::size_t>(std::ceil(b.y + b.height)));
        const auto c0 = static_cast<std::size_t>(std::max(0.0, std::floor(b.x)));
        const auto c1 = std::min(p.width, static_cast<std::size_t>(std::ceil(b.x + b.width)));
        for (std::size_t r = r0; r < r1; ++r) {
            const double cov_y = overlap(static_cast<double>(r), b.y, b.y + b.height);
            const double v = (static_cast<double>(r) + 0.5 - b.y) / b.height;
            for (std::size_t c = c0; c < c1; ++c) {
                const double cov = cov_y * overlap(static_cast<double>(c), b.x, b.x + b.width);
                if (cov <= 0.0) continue;
                const double u = (static_cast<double>(c) + 0.5 - b.x) / b.width;
                const double rim = std::min(std::min(u, 1.0 - u), std::min(v, 1.0 - v));
                const double value = rim < 0.06 ? 20.0
                                                : object.at(v * (kTextureCells - 1), u * (kTextureCells - 1));
                img(r, c, 0) = cov * value + (1.0 - cov) * img(r, c, 0);
            }
        }
        seq.frames.emplace_back(std::move(img));
        seq.ground_truth.push_back(b);
    }
    return seq;
}

} // namespace scaletrack
