#include "scaletrack/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scaletrack/errors.hpp"

namespace scaletrack::oracle {

std::vector<cdouble> direct_dft(std::span<const cdouble> x, bool inverse) {
    const std::size_t n = x.size();
    std::vector<cdouble> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        cdouble s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) /
                                 static_cast<double>(n);
            s += x[j] * cdouble(std::cos(angle), std::sin(angle));
        }
        out[k] = inverse ? s / static_cast<double>(n) : s;
    }
    return out;
}

Tensor direct_correlation_2d(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw InvalidInput("direct_correlation_2d: shape mismatch");
    const std::size_t rows = a.rows(), cols = a.cols();
    Tensor out(rows, cols, a.channels());
    for (std::size_t ch = 0; ch < a.channels(); ++ch)
        for (std::size_t tr = 0; tr < rows; ++tr)
            for (std::size_t tc = 0; tc < cols; ++tc) {
                double s = 0.0;
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t c = 0; c < cols; ++c)
                        s += a(r, c, ch) * b((r + tr) % rows, (c + tc) % cols, ch);
                out(tr, tc, ch) = s;
            }
    return out;
}

std::vector<double> direct_circular_convolution(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw InvalidInput("direct_circular_convolution: length mismatch");
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < n; ++j) out[t] += a[j] * b[(t + n - j) % n];
    return out;
}

std::vector<double> direct_hann(std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (length < 2) return w;
    for (std::size_t i = 0; i < length; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(length - 1)));
    return w;
}

std::vector<DirectLevel> direct_scale_levels(double width, double height, double step, std::size_t count) {
    std::vector<DirectLevel> out;
    // Symmetric range for odd counts; one extra level below for even counts.
    const int d = static_cast<int>(count);
    const int lo = -(d / 2), hi = (d - 1) / 2;
    for (int b = lo; b <= hi; ++b) {
        // Extended-precision product, rounded once.
        long double e = 1.0L;
        for (int i = 0; i < std::abs(b); ++i) e *= static_cast<long double>(step);
        const double f = static_cast<double>(b >= 0 ? e : 1.0L / e);
        out.push_back({b, f * width, f * height});
    }
    return out;
}

namespace {

// Dense matrix of v -> v (*) w for a length-D row (circular convolution).
Eigen::MatrixXd convolution_matrix(const Eigen::RowVectorXd& w) {
    const Eigen::Index d = w.size();
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index t = 0; t < d; ++t)
        for (Eigen::Index j = 0; j < d; ++j) m(t, j) = w((t - j + d) % d);
    return m;
}

} // namespace

RidgeSolution dense_ridge_regression(const Eigen::MatrixXd& sample, std::span<const double> label,
                                     double lambda) {
    const Eigen::Index k = sample.rows(), d = sample.cols();
    if (static_cast<Eigen::Index>(label.size()) != d) throw InvalidInput("dense_ridge_regression: label length");
    Eigen::MatrixXd a(d, k * d);
    for (Eigen::Index r = 0; r < k; ++r) a.middleCols(r * d, d) = convolution_matrix(sample.row(r));
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(label.data(), d);
    const Eigen::MatrixXd normal =
        a.transpose() * a + lambda * Eigen::MatrixXd::Identity(k * d, k * d);
    const Eigen::VectorXd h = normal.fullPivLu().solve(a.transpose() * y);
    RidgeSolution s;
    s.filter.resize(k, d);
    for (Eigen::Index r = 0; r < k; ++r) s.filter.row(r) = h.segment(r * d, d).transpose();
    s.prediction = a * h;
    return s;
}

std::vector<double> direct_scale_confidence(const Eigen::MatrixXd& filter_rows, const Eigen::MatrixXd& z) {
    if (filter_rows.rows() != z.rows() || filter_rows.cols() != z.cols())
        throw InvalidInput("direct_scale_confidence: shape mismatch");
    const auto d = static_cast<std::size_t>(z.cols());
    std::vector<double> out(d, 0.0);
    std::vector<double> h(d), zr(d);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            h[i] = filter_rows(r, static_cast<Eigen::Index>(i));
            zr[i] = z(r, static_cast<Eigen::Index>(i));
        }
        const auto c = direct_circular_convolution(h, zr);
        for (std::size_t i = 0; i < d; ++i) out[i] += c[i];
    }
    return out;
}

Eigen::MatrixXd spatial_rows(const Eigen::MatrixXcd& spectrum_rows) {
    Eigen::MatrixXd out(spectrum_rows.rows(), spectrum_rows.cols());
    std::vector<cdouble> row(static_cast<std::size_t>(spectrum_rows.cols()));
    for (Eigen::Index r = 0; r < spectrum_rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < spectrum_rows.cols(); ++c) row[static_cast<std::size_t>(c)] = spectrum_rows(r, c);
        const auto x = direct_dft(row, true);
        for (Eigen::Index c = 0; c < spectrum_rows.cols(); ++c) out(r, c) = x[static_cast<std::size_t>(c)].real();
    }
    return out;
}

Tensor dense_translation_solve(const std::vector<Tensor>& samples, std::span<const double> weights,
                               const Tensor& label, const Tensor& spatial_weight, double lambda) {
    if (samples.empty() || samples.size() != weights.size())
        throw InvalidInput("dense_translation_solve: samples and weights disagree");
    const std::size_t rows = label.rows(), cols = label.cols(), m = samples.front().channels();
    const auto n = static_cast<Eigen::Index>(rows * cols);
    const Eigen::Index unknowns = n * static_cast<Eigen::Index>(m);
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(unknowns, unknowns);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < rows * cols; ++i) y(static_cast<Eigen::Index>(i)) = label.data()[i];

    for (std::size_t j = 0; j < samples.size(); ++j) {
        // a[t, (c, s)] = x_jc[t - s], the 2D circular convolution operator.
        Eigen::MatrixXd a(n, unknowns);
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t tr = 0; tr < rows; ++tr)
                for (std::size_t tc = 0; tc < cols; ++tc)
                    for (std::size_t sr = 0; sr < rows; ++sr)
                        for (std::size_t sc = 0; sc < cols; ++sc)
                            a(static_cast<Eigen::Index>(tr * cols + tc),
                              static_cast<Eigen::Index>(c * rows * cols + sr * cols + sc)) =
                                samples[j]((tr + rows - sr) % rows, (tc + cols - sc) % cols, c);
        normal += weights[j] * a.transpose() * a;
        rhs += weights[j] * a.transpose() * y;
    }
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t i = 0; i < rows * cols; ++i) {
            const auto idx = static_cast<Eigen::Index>(c * rows * cols + i);
            const double w = spatial_weight.data()[i];
            normal(idx, idx) += lambda * w * w;
        }
    const Eigen::VectorXd f = normal.ldlt().solve(rhs);
    Tensor out(rows, cols, m);
    for (Eigen::Index i = 0; i < unknowns; ++i) out.data()[i] = f(i);
    return out;
}

std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

double fraction_at_most(std::span<const double> values, double threshold) {
    std::size_t k = 0;
    for (double v : values)
        if (v <= threshold) ++k;
    return values.empty() ? 0.0 : static_cast<double>(k) / static_cast<double>(values.size());
}

double fraction_above(std::span<const double> values, double threshold) {
    std::size_t k = 0;
    for (double v : values)
        if (v > threshold) ++k;
    return values.empty() ? 0.0 : static_cast<double>(k) / static_cast<double>(values.size());
}

std::uint64_t Random::next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double Random::uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t Random::index(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(next() % (hi - lo + 1));
}

Tensor Random::tensor(std::size_t rows, std::size_t cols, std::size_t channels, double lo, double hi) {
    Tensor t(rows, cols, channels);
    for (auto& v : t.values()) v = uniform(lo, hi);
    return t;
}

} // namespace scaletrack::oracle
