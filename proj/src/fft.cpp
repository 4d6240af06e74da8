#include "scaletrack/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "scaletrack/errors.hpp"

namespace scaletrack {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (length, direction) and kept.
class PlanCache {
public:
    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find({n, sign});
        if (it != plans_.end()) return it->second;
        std::vector<cdouble> scratch(static_cast<std::size_t>(n));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(std::pair{n, sign}, p);
        return p;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

// Unnormalized in-place transform of a contiguous buffer.
void transform(std::span<cdouble> buf, int sign) {
    if (buf.size() <= 1) return;
    fftw_plan p = plan_cache().get(static_cast<int>(buf.size()), sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(p, ptr, ptr);
}

// Transforms every channel of `t` along the requested axes in place.
void transform(CTensor& t, Axes axes, int sign) {
    const std::size_t rows = t.rows(), cols = t.cols();
    const bool along_cols = axes != Axes::rows;  // varies column index
    const bool along_rows = axes != Axes::cols;
    std::vector<cdouble> line(std::max(rows, cols));
    for (std::size_t ch = 0; ch < t.channels(); ++ch) {
        if (along_cols) {
            for (std::size_t r = 0; r < rows; ++r) {
                std::span<cdouble> row(&t(r, 0, ch), cols);
                transform(row, sign);
            }
        }
        if (along_rows) {
            std::span<cdouble> col(line.data(), rows);
            for (std::size_t c = 0; c < cols; ++c) {
                for (std::size_t r = 0; r < rows; ++r) col[r] = t(r, c, ch);
                transform(col, sign);
                for (std::size_t r = 0; r < rows; ++r) t(r, c, ch) = col[r];
            }
        }
    }
}

std::size_t transformed_length(const CTensor& t, Axes axes) {
    switch (axes) {
        case Axes::rows: return t.rows();
        case Axes::cols: return t.cols();
        case Axes::both: return t.rows() * t.cols();
    }
    return 1;
}

} // namespace

std::vector<cdouble> fft(std::span<const double> x) {
    if (x.empty()) throw InvalidInput("fft: empty input");
    std::vector<cdouble> out(x.begin(), x.end());
    transform(out, FFTW_FORWARD);
    return out;
}

std::vector<cdouble> fft(std::span<const cdouble> x) {
    if (x.empty()) throw InvalidInput("fft: empty input");
    std::vector<cdouble> out(x.begin(), x.end());
    transform(out, FFTW_FORWARD);
    return out;
}

std::vector<cdouble> ifft(std::span<const cdouble> x) {
    if (x.empty()) throw InvalidInput("ifft: empty input");
    std::vector<cdouble> out(x.begin(), x.end());
    transform(out, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

Spectrum fft(const Tensor& x, Axes axes) {
    if (x.empty()) throw InvalidInput("fft: empty tensor");
    CTensor c(x.rows(), x.cols(), x.channels());
    for (std::size_t i = 0; i < x.size(); ++i) c.data()[i] = x.data()[i];
    transform(c, axes, FFTW_FORWARD);
    return {std::move(c), axes};
}

Spectrum fft(const CTensor& x, Axes axes) {
    if (x.empty()) throw InvalidInput("fft: empty tensor");
    CTensor c = x;
    transform(c, axes, FFTW_FORWARD);
    return {std::move(c), axes};
}

CTensor ifft(const Spectrum& s) {
    if (s.data.empty()) throw InvalidInput("ifft: empty spectrum");
    CTensor c = s.data;
    transform(c, s.axes, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(transformed_length(c, s.axes));
    for (auto& v : c.values()) v *= scale;
    return c;
}

Tensor ifft_real(const Spectrum& s) {
    CTensor c = ifft(s);
    Tensor out(c.rows(), c.cols(), c.channels());
    for (std::size_t i = 0; i < c.size(); ++i) out.data()[i] = c.data()[i].real();
    return out;
}

Tensor circular_correlate(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw InvalidInput("circular_correlate: shape mismatch");
    if (a.empty()) throw InvalidInput("circular_correlate: empty input");
    Spectrum fa = fft(a);
    Spectrum fb = fft(b);
    for (std::size_t i = 0; i < fa.data.size(); ++i)
        fb.data.data()[i] *= std::conj(fa.data.data()[i]);
    return ifft_real(fb);
}

std::vector<double> hann_window(std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (length <= 1) return w;
    const double denom = static_cast<double>(length - 1);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom));
    // Pin exact endpoint/centre values that cos() only reaches approximately.
    w.front() = 0.0;
    w.back() = 0.0;
    if (length % 2 == 1) w[length / 2] = 1.0;
    return w;
}

Tensor hann_window(std::size_t rows, std::size_t cols) {
    const auto wr = hann_window(rows);
    const auto wc = hann_window(cols);
    Tensor w(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) w(r, c) = wr[r] * wc[c];
    return w;
}

} // namespace scaletrack
