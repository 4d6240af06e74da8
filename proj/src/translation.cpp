#include "scaletrack/translation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scaletrack/errors.hpp"
#include "scaletrack/fft.hpp"

namespace scaletrack {
namespace {

double signed_offset(std::size_t i, std::size_t n) {
    return i <= n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n);
}

double inner(const CTensor& a, const CTensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a.data()[i]) * b.data()[i]).real();
    return s;
}

// Spatial weight penalty: FFT(w^2 * IFFT(F_c)) per channel.
CTensor apply_penalty(const CTensor& f, const Tensor& w_squared) {
    CTensor spatial = ifft({f, Axes::both});
    for (std::size_t ch = 0; ch < spatial.channels(); ++ch) {
        auto plane = spatial.channel(ch);
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] *= w_squared.data()[i];
    }
    return fft(spatial, Axes::both).data;
}

// Normal-equation operator for the unknown F = conj(filter).
class NormalOperator {
public:
    NormalOperator(const SampleMemory& memory, const TranslationFilter& f)
        : memory_(memory), lambda_(f.lambda), w_squared_(f.spatial_weight) {
        for (auto& v : w_squared_.values()) v *= v;
    }

    CTensor apply(const CTensor& x) const {
        CTensor out = apply_penalty(x, w_squared_);
        for (auto& v : out.values()) v *= lambda_;
        const std::size_t n = x.plane_size(), m = x.channels();
        std::vector<cdouble> proj(n);
        for (const auto& e : memory_.entries()) {
            std::fill(proj.begin(), proj.end(), cdouble{});
            for (std::size_t c = 0; c < m; ++c) {
                auto xs = e.spectrum.channel(c);
                auto fx = x.channel(c);
                for (std::size_t k = 0; k < n; ++k) proj[k] += xs[k] * fx[k];
            }
            for (std::size_t c = 0; c < m; ++c) {
                auto xs = e.spectrum.channel(c);
                auto o = out.channel(c);
                for (std::size_t k = 0; k < n; ++k) o[k] += e.weight * std::conj(xs[k]) * proj[k];
            }
        }
        return out;
    }

private:
    const SampleMemory& memory_;
    double lambda_;
    Tensor w_squared_;
};

} // namespace

void validate(const TranslationParams& p) {
    if (p.basis_channels < 1) throw InvalidInput("translation: basis channels must be >= 1");
    if (!(p.lambda > 0.0)) throw InvalidInput("translation: lambda must be positive");
    if (!(p.sigma_factor > 0.0)) throw InvalidInput("translation: sigma factor must be positive");
    if (p.cg_iterations_first < 1 || p.cg_iterations_update < 0)
        throw InvalidInput("translation: invalid CG iteration caps");
    if (p.memory_capacity < 1) throw InvalidInput("translation: memory capacity must be >= 1");
    if (!(p.memory_decay > 0.0 && p.memory_decay <= 1.0))
        throw InvalidInput("translation: memory decay must be in (0, 1]");
    if (!(p.weight_base >= 1.0)) throw InvalidInput("translation: weight base must be >= 1");
    if (p.weight_coefficients < 1) throw InvalidInput("translation: need >= 1 weight coefficient");
}

Eigen::MatrixXd learn_projection(const FeatureMap& features, std::size_t m) {
    const std::size_t g = features.channels();
    if (m < 1 || m > g) throw InvalidInput("learn_projection: need 1 <= m <= G");
    const std::size_t n = features.data.plane_size();
    if (n == 0) throw InvalidInput("learn_projection: empty features");

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(g));
    for (std::size_t c = 0; c < g; ++c) {
        auto plane = features.data.channel(c);
        for (std::size_t i = 0; i < n; ++i)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = plane[i];
    }
    x.rowwise() -= x.colwise().mean();
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    // Eigenvalues ascend; take the last m columns in descending order.
    Eigen::MatrixXd c(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        Eigen::VectorXd v = eig.eigenvectors().col(static_cast<Eigen::Index>(g - 1 - j));
        Eigen::Index arg;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        c.col(static_cast<Eigen::Index>(j)) = v;
    }
    return c;
}

FeatureMap project(const FeatureMap& features, const Eigen::MatrixXd& projection) {
    const std::size_t g = features.channels();
    if (static_cast<std::size_t>(projection.rows()) != g)
        throw InvalidInput("project: projection rows must equal feature channels");
    const auto m = static_cast<std::size_t>(projection.cols());
    FeatureMap out{Tensor(features.rows(), features.cols(), m), features.stride};
    const std::size_t n = features.data.plane_size();
    for (std::size_t j = 0; j < m; ++j) {
        auto dst = out.data.channel(j);
        for (std::size_t c = 0; c < g; ++c) {
            const double w = projection(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
            if (w == 0.0) continue;
            auto src = features.data.channel(c);
            for (std::size_t i = 0; i < n; ++i) dst[i] += w * src[i];
        }
    }
    return out;
}

SampleMemory::SampleMemory(std::size_t capacity, double decay) : capacity_(capacity), decay_(decay) {
    if (capacity_ < 1) throw InvalidInput("sample memory: capacity must be >= 1");
    if (!(decay_ > 0.0 && decay_ <= 1.0)) throw InvalidInput("sample memory: decay must be in (0, 1]");
}

void SampleMemory::insert(CTensor spectrum) {
    if (!entries_.empty() && !entries_.front().spectrum.same_shape(spectrum))
        throw InvalidInput("sample memory: sample dims do not match the template");
    if (entries_.empty()) {
        entries_.push_back({std::move(spectrum), 1.0});
        return;
    }
    for (auto& e : entries_) e.weight *= (1.0 - decay_);
    entries_.push_back({std::move(spectrum), decay_});
    if (entries_.size() > capacity_) {
        auto lowest = std::min_element(entries_.begin(), entries_.end(),
                                       [](const Entry& a, const Entry& b) { return a.weight < b.weight; });
        entries_.erase(lowest);
    }
    double total = 0.0;
    for (const auto& e : entries_) total += e.weight;
    for (auto& e : entries_) e.weight /= total;
}

Tensor make_spatial_weight(std::size_t rows, std::size_t cols, double target_rows,
                           double target_cols, const TranslationParams& p) {
    Tensor w(rows, cols, 1, p.weight_base);
    if (p.uniform_weight) return w;
    const double hy = std::max(0.5, 0.5 * target_rows), hx = std::max(0.5, 0.5 * target_cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double dy = signed_offset(r, rows) / hy, dx = signed_offset(c, cols) / hx;
            w(r, c) = std::min(p.weight_base + p.weight_gain * (dy * dy + dx * dx), p.weight_clip);
        }
    // Keep only the lowest frequencies on each axis.
    Spectrum s = fft(w);
    const double keep = 0.5 * static_cast<double>(p.weight_coefficients - 1);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (std::abs(signed_offset(r, rows)) > keep || std::abs(signed_offset(c, cols)) > keep)
                s.data(r, c) = 0.0;
    w = ifft_real(s);
    const double lowest = *std::min_element(w.values().begin(), w.values().end());
    for (auto& v : w.values()) v += p.weight_base - lowest;
    return w;
}

CTensor make_translation_label(std::size_t rows, std::size_t cols, double sigma) {
    if (!(sigma > 0.0)) throw InvalidInput("translation label: sigma must be positive");
    Tensor y(rows, cols);
    const double cr = static_cast<double>(rows / 2), cc = static_cast<double>(cols / 2);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double dr = static_cast<double>(r) - cr, dc = static_cast<double>(c) - cc;
            y(r, c) = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
        }
    return fft(y).data;
}

double translation_objective(const SampleMemory& memory, const TranslationFilter& f) {
    const CTensor& h = f.filter;
    const std::size_t n = h.plane_size(), m = h.channels();
    double data = 0.0;
    std::vector<cdouble> resid(n);
    for (const auto& e : memory.entries()) {
        for (std::size_t k = 0; k < n; ++k) resid[k] = -f.label.data()[k];
        for (std::size_t c = 0; c < m; ++c) {
            auto xs = e.spectrum.channel(c);
            auto hs = h.channel(c);
            for (std::size_t k = 0; k < n; ++k) resid[k] += std::conj(hs[k]) * xs[k];
        }
        double s = 0.0;
        for (const auto& v : resid) s += std::norm(v);
        data += e.weight * s / static_cast<double>(n);
    }
    CTensor conj_h = h;
    for (auto& v : conj_h.values()) v = std::conj(v);
    const CTensor spatial = ifft({conj_h, Axes::both});
    double reg = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
        auto plane = spatial.channel(c);
        for (std::size_t i = 0; i < n; ++i)
            reg += std::norm(plane[i] * f.spatial_weight.data()[i]);
    }
    return data + f.lambda * reg;
}

SolveReport learn_translation_filter(const SampleMemory& memory, TranslationFilter& f,
                                     int max_iterations, double tolerance, bool record_objective) {
    if (memory.empty()) throw InvalidInput("learn_translation_filter: empty sample memory");
    const CTensor& first = memory.entries().front().spectrum;
    if (f.filter.empty()) f.filter = CTensor(first.rows(), first.cols(), first.channels());
    if (!f.filter.same_shape(first) || f.label.plane_size() != first.plane_size() ||
        f.spatial_weight.plane_size() != first.plane_size())
        throw InvalidInput("learn_translation_filter: filter and samples disagree in shape");

    const std::size_t n = first.plane_size(), m = first.channels();
    const NormalOperator op(memory, f);

    // Right-hand side and Jacobi preconditioner.
    CTensor b(first.rows(), first.cols(), m);
    Tensor diag(first.rows(), first.cols(), m);
    double mean_w2 = 0.0;
    for (double w : f.spatial_weight.values()) mean_w2 += w * w;
    mean_w2 /= static_cast<double>(n);
    for (auto& v : diag.values()) v = f.lambda * mean_w2;
    for (const auto& e : memory.entries())
        for (std::size_t c = 0; c < m; ++c) {
            auto xs = e.spectrum.channel(c);
            auto bs = b.channel(c);
            auto ds = diag.channel(c);
            for (std::size_t k = 0; k < n; ++k) {
                bs[k] += e.weight * std::conj(xs[k]) * f.label.data()[k];
                ds[k] += e.weight * std::norm(xs[k]);
            }
        }

    CTensor x = f.filter;
    for (auto& v : x.values()) v = std::conj(v);
    auto store = [&](const CTensor& sol) {
        f.filter = sol;
        for (auto& v : f.filter.values()) v = std::conj(v);
    };

    SolveReport report;
    CTensor r = b;
    {
        const CTensor ax = op.apply(x);
        for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] -= ax.data()[i];
    }
    auto precondition = [&](const CTensor& v) {
        CTensor z = v;
        for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] /= diag.data()[i];
        return z;
    };
    const double r0 = std::sqrt(inner(r, r));
    report.residuals.push_back(r0);
    if (record_objective) report.objectives.push_back(translation_objective(memory, f));
    if (r0 == 0.0) return report;

    CTensor z = precondition(r);
    CTensor p = z;
    double rz = inner(r, z);
    int growth = 0;
    for (int it = 0; it < max_iterations; ++it) {
        const CTensor ap = op.apply(p);
        const double pap = inner(p, ap);
        if (!(pap > 0.0)) break;
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x.data()[i] += alpha * p.data()[i];
            r.data()[i] -= alpha * ap.data()[i];
        }
        const double rn = std::sqrt(inner(r, r));
        report.iterations = it + 1;
        growth = rn > report.residuals.back() ? growth + 1 : 0;
        report.residuals.push_back(rn);
        store(x);
        if (record_objective) report.objectives.push_back(translation_objective(memory, f));
        if (!std::isfinite(rn) || growth >= 5) {
            throw NumericalFailure("conjugate gradient diverged",
                                   std::vector<cdouble>(f.filter.values().begin(),
                                                        f.filter.values().end()));
        }
        if (rn <= tolerance * r0) break;
        z = precondition(r);
        const double rz_next = inner(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < p.size(); ++i) p.data()[i] = z.data()[i] + beta * p.data()[i];
    }
    return report;
}

Localization localize(const TranslationFilter& f, const CTensor& search, int newton_iterations) {
    if (!f.filter.same_shape(search)) throw InvalidInput("localize: search sample shape mismatch");
    const std::size_t n = search.plane_size();
    CTensor resp(search.rows(), search.cols());
    for (std::size_t c = 0; c < search.channels(); ++c) {
        auto hs = f.filter.channel(c);
        auto xs = search.channel(c);
        for (std::size_t k = 0; k < n; ++k) resp.data()[k] += std::conj(hs[k]) * xs[k];
    }
    Localization out;
    out.response = ifft_real({resp, Axes::both});
    double peak_abs = 0.0;
    for (double v : out.response.values()) {
        if (!std::isfinite(v)) throw DegenerateResponse("translation response is not finite");
        peak_abs = std::max(peak_abs, std::abs(v));
    }
    if (peak_abs == 0.0) throw DegenerateResponse("translation response is all zero");

    const Peak2D peak = refine_peak(out.response, newton_iterations);
    auto wrap = [](double v, std::size_t len) {
        const double l = static_cast<double>(len);
        v = std::fmod(v, l);
        if (v >= 0.5 * l) v -= l;
        if (v < -0.5 * l) v += l;
        return v;
    };
    out.row_offset = wrap(peak.row - static_cast<double>(search.rows() / 2), search.rows());
    out.col_offset = wrap(peak.col - static_cast<double>(search.cols() / 2), search.cols());
    out.score = peak.value;
    return out;
}

void shift_spectrum(CTensor& spectrum, double dy, double dx) {
    const std::size_t rows = spectrum.rows(), cols = spectrum.cols();
    auto factor = [](std::size_t k, std::size_t len, double d) -> cdouble {
        if (len % 2 == 0 && k == len / 2) return std::cos(std::numbers::pi * d);
        const double f = signed_offset(k, len);
        return std::polar(1.0, 2.0 * std::numbers::pi * f * d / static_cast<double>(len));
    };
    std::vector<cdouble> fx(cols);
    for (std::size_t c = 0; c < cols; ++c) fx[c] = factor(c, cols, dx);
    for (std::size_t r = 0; r < rows; ++r) {
        const cdouble fy = factor(r, rows, dy);
        for (std::size_t ch = 0; ch < spectrum.channels(); ++ch)
            for (std::size_t c = 0; c < cols; ++c) spectrum(r, c, ch) *= fy * fx[c];
    }
}

TranslationModel::TranslationModel(TranslationParams params, std::size_t rows, std::size_t cols,
                                   double target_rows, double target_cols)
    : params_(params),
      rows_(rows),
      cols_(cols),
      window_(hann_window(rows, cols)),
      memory_(params.memory_capacity, params.memory_decay) {
    validate(params_);
    if (rows < 2 || cols < 2) throw InvalidInput("translation model: template too small");
    filter_.lambda = params_.lambda;
    filter_.spatial_weight = make_spatial_weight(rows, cols, target_rows, target_cols, params_);
    const double sigma = params_.sigma_factor * std::sqrt(target_rows * target_cols);
    filter_.label = make_translation_label(rows, cols, sigma);
}

SolveReport TranslationModel::init(const FeatureMap& raw) {
    if (raw.rows() != rows_ || raw.cols() != cols_)
        throw InvalidInput("translation model: feature map does not match the template");
    FeatureMap windowed = raw;
    for (std::size_t ch = 0; ch < windowed.channels(); ++ch) {
        auto plane = windowed.data.channel(ch);
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] *= window_.data()[i];
    }
    const std::size_t m = std::min(params_.basis_channels, raw.channels());
    filter_.projection = learn_projection(windowed, m);
    filter_.filter = CTensor();
    memory_ = SampleMemory(params_.memory_capacity, params_.memory_decay);
    memory_.insert(fft(project(windowed, filter_.projection).data).data);
    return learn_translation_filter(memory_, filter_, params_.cg_iterations_first,
                                    params_.cg_tolerance);
}

CTensor TranslationModel::prepare(const FeatureMap& raw) const {
    if (raw.rows() != rows_ || raw.cols() != cols_)
        throw InvalidInput("translation model: feature map does not match the template");
    FeatureMap projected = project(raw, filter_.projection);
    for (std::size_t ch = 0; ch < projected.channels(); ++ch) {
        auto plane = projected.data.channel(ch);
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] *= window_.data()[i];
    }
    return fft(projected.data).data;
}

Localization TranslationModel::detect(const CTensor& prepared) const {
    return localize(filter_, prepared, params_.newton_iterations);
}

SolveReport TranslationModel::update(CTensor prepared) {
    memory_.insert(std::move(prepared));
    return learn_translation_filter(memory_, filter_, params_.cg_iterations_update,
                                    params_.cg_tolerance);
}

} // namespace scaletrack
