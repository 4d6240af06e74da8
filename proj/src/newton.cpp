#include "scaletrack/newton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scaletrack/fft.hpp"

namespace scaletrack {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Value and first two derivatives of one axis factor of the interpolant basis.
struct Basis {
    cdouble v, d1, d2;
};

Basis axis_basis(std::size_t k, std::size_t n, double x) {
    if (n % 2 == 0 && k == n / 2) {
        const double w = std::numbers::pi;
        return {std::cos(w * x), -w * std::sin(w * x), -w * w * std::cos(w * x)};
    }
    const double f = k <= n / 2 ? static_cast<double>(k)
                                : static_cast<double>(k) - static_cast<double>(n);
    const double w = kTwoPi * f / static_cast<double>(n);
    const cdouble e = std::polar(1.0, w * x);
    const cdouble iw(0.0, w);
    return {e, iw * e, iw * iw * e};
}

struct Eval1D {
    double v, d1, d2;
};

Eval1D evaluate(const std::vector<cdouble>& spec, double x) {
    const std::size_t n = spec.size();
    cdouble v = 0, d1 = 0, d2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Basis b = axis_basis(k, n, x);
        v += spec[k] * b.v;
        d1 += spec[k] * b.d1;
        d2 += spec[k] * b.d2;
    }
    const double inv = 1.0 / static_cast<double>(n);
    return {v.real() * inv, d1.real() * inv, d2.real() * inv};
}

struct Eval2D {
    double v, gy, gx, hyy, hxx, hxy;
};

Eval2D evaluate(const CTensor& spec, double y, double x) {
    const std::size_t ny = spec.rows(), nx = spec.cols();
    std::vector<Basis> bx(nx);
    for (std::size_t k = 0; k < nx; ++k) bx[k] = axis_basis(k, nx, x);
    cdouble v = 0, gy = 0, gx = 0, hyy = 0, hxx = 0, hxy = 0;
    for (std::size_t ky = 0; ky < ny; ++ky) {
        const Basis by = axis_basis(ky, ny, y);
        cdouble rv = 0, rd1 = 0, rd2 = 0;
        for (std::size_t kx = 0; kx < nx; ++kx) {
            const cdouble s = spec(ky, kx);
            rv += s * bx[kx].v;
            rd1 += s * bx[kx].d1;
            rd2 += s * bx[kx].d2;
        }
        v += by.v * rv;
        gy += by.d1 * rv;
        gx += by.v * rd1;
        hyy += by.d2 * rv;
        hxx += by.v * rd2;
        hxy += by.d1 * rd1;
    }
    const double inv = 1.0 / static_cast<double>(ny * nx);
    return {v.real() * inv,   gy.real() * inv,  gx.real() * inv,
            hyy.real() * inv, hxx.real() * inv, hxy.real() * inv};
}

} // namespace

double interpolant_at(std::span<const double> response, double x) {
    return evaluate(fft(response), x).v;
}

Peak1D refine_peak(std::span<const double> response, int iterations) {
    Peak1D peak;
    if (response.empty()) return peak;
    peak.grid_index = static_cast<std::size_t>(
        std::max_element(response.begin(), response.end()) - response.begin());
    peak.position = static_cast<double>(peak.grid_index);
    peak.value = response[peak.grid_index];
    if (response.size() < 2) return peak;

    const auto spec = fft(response);
    const double lo = peak.position - 0.5, hi = peak.position + 0.5;
    double x = peak.position;
    for (int it = 0; it < iterations; ++it) {
        const Eval1D e = evaluate(spec, x);
        if (e.d1 == 0.0) break;
        // Ascend along the gradient when the curvature is not that of a maximum.
        const double step = e.d2 < 0.0 ? -e.d1 / e.d2 : std::copysign(0.5, e.d1);
        const double next = std::clamp(x + step, lo, hi);
        if (!std::isfinite(next)) break;
        x = next;
    }
    peak.position = x;
    peak.value = evaluate(spec, x).v;
    return peak;
}

Peak2D refine_peak(const Tensor& response, int iterations) {
    Peak2D peak;
    if (response.empty()) return peak;
    const auto plane = response.channel(0);
    const auto best = static_cast<std::size_t>(std::max_element(plane.begin(), plane.end()) -
                                               plane.begin());
    peak.grid_row = best / response.cols();
    peak.grid_col = best % response.cols();
    peak.row = static_cast<double>(peak.grid_row);
    peak.col = static_cast<double>(peak.grid_col);
    peak.value = plane[best];

    Tensor single(response.rows(), response.cols());
    std::copy(plane.begin(), plane.end(), single.values().begin());
    const CTensor spec = fft(single).data;

    double y = peak.row, x = peak.col;
    for (int it = 0; it < iterations; ++it) {
        const Eval2D e = evaluate(spec, y, x);
        const double det = e.hyy * e.hxx - e.hxy * e.hxy;
        double sy, sx;
        if (e.hyy < 0.0 && det > 0.0) {
            sy = -(e.hxx * e.gy - e.hxy * e.gx) / det;
            sx = -(e.hyy * e.gx - e.hxy * e.gy) / det;
        } else {
            sy = response.rows() > 1 ? std::copysign(std::min(0.5, std::abs(e.gy)), e.gy) : 0.0;
            sx = response.cols() > 1 ? std::copysign(std::min(0.5, std::abs(e.gx)), e.gx) : 0.0;
        }
        const double ny = std::clamp(y + sy, peak.row - 0.5, peak.row + 0.5);
        const double nx = std::clamp(x + sx, peak.col - 0.5, peak.col + 0.5);
        if (!std::isfinite(ny) || !std::isfinite(nx)) break;
        y = response.rows() > 1 ? ny : y;
        x = response.cols() > 1 ? nx : x;
    }
    peak.row = y;
    peak.col = x;
    peak.value = evaluate(spec, y, x).v;
    return peak;
}

} // namespace scaletrack
