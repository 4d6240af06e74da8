#include "scaletrack/scale.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scaletrack/errors.hpp"
#include "scaletrack/fft.hpp"
#include "scaletrack/interpolation.hpp"

namespace scaletrack {
namespace {

int floor_div2(long v) { return static_cast<int>(std::floor(static_cast<double>(v) / 2.0)); }

void check_center(const TargetGeometry& t, double frame_width, double frame_height) {
    if (!(t.width > 0.0 && t.height > 0.0)) throw InvalidInput("scale sample: target size must be positive");
    if (!(t.cx >= 0.0 && t.cx < frame_width && t.cy >= 0.0 && t.cy < frame_height))
        throw InvalidInput("scale sample: target centre lies outside the frame");
}

ScaleSample assemble(const std::vector<Eigen::VectorXd>& columns) {
    ScaleSample s(columns.front().size(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t d = 0; d < columns.size(); ++d) {
        if (columns[d].size() != s.rows()) throw ProviderError("scale sample: column lengths differ");
        s.col(static_cast<Eigen::Index>(d)) = columns[d];
    }
    return s;
}

std::size_t at_least(double v, std::size_t lo) {
    return std::max(lo, static_cast<std::size_t>(std::lround(v)));
}

} // namespace

ScaleSet build_scale_set(double width, double height, double step, std::size_t count) {
    if (!(width > 0.0 && height > 0.0)) throw InvalidInput("scale set: dims must be positive");
    if (!(step > 1.0)) throw InvalidInput("scale set: step must exceed 1");
    if (count < 1) throw InvalidInput("scale set: need at least one level");
    ScaleSet q;
    q.step = step;
    const long d = static_cast<long>(count);
    const int lo = floor_div2(-(d - 1)), hi = floor_div2(d - 1);
    for (int b = lo; b <= hi; ++b) {
        const double f = std::pow(step, b);
        q.levels.push_back({b, f, f * width, f * height});
    }
    return q;
}

Eigen::VectorXd vectorize(const FeatureMap& map) {
    const std::size_t rows = map.rows(), cols = map.cols(), chans = map.channels();
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows * cols * chans));
    Eigen::Index i = 0;
    for (std::size_t ch = 0; ch < chans; ++ch)
        for (std::size_t c = 0; c < cols; ++c)
            for (std::size_t r = 0; r < rows; ++r) v(i++) = map.data(r, c, ch);
    return v;
}

ScaleSample hrsem_sample(const FeatureMap& full, double frame_width, double frame_height,
                         const TargetGeometry& target, const ScaleSet& scales,
                         std::size_t canonical_rows, std::size_t canonical_cols) {
    check_center(target, frame_width, frame_height);
    const double s = full.stride;
    std::vector<Eigen::VectorXd> columns;
    columns.reserve(scales.size());
    for (const ScaleLevel& lv : scales.levels) {
        const Rect px = Rect::centered(target.cx, target.cy, lv.factor * target.width,
                                       lv.factor * target.height);
        const CropOperator crop{{px.x / s, px.y / s, px.width / s, px.height / s}, false};
        columns.push_back(vectorize(crop_and_resample(full, crop, canonical_rows, canonical_cols)));
    }
    return assemble(columns);
}

FrameBatch region_batch(const Frame& frame, const TargetGeometry& target, const ScaleSet& scales,
                        std::size_t input_rows, std::size_t input_cols) {
    check_center(target, static_cast<double>(frame.width()), static_cast<double>(frame.height()));
    FrameBatch batch;
    batch.slices.reserve(scales.size());
    for (const ScaleLevel& lv : scales.levels) {
        const CropOperator crop{Rect::centered(target.cx, target.cy, lv.factor * target.width,
                                               lv.factor * target.height),
                                false};
        batch.slices.push_back(crop_and_resample(frame, crop, input_rows, input_cols));
    }
    return batch;
}

ScaleSample rrsem_sample(const Frame& frame, const TargetGeometry& target, const ScaleSet& scales,
                         FeatureProvider& provider, const std::string& layer,
                         std::size_t input_rows, std::size_t input_cols) {
    if (!provider.descriptor().supports_batch)
        throw ContractError("rrsem: provider '" + provider.descriptor().name +
                            "' does not support batched extraction");
    const FrameBatch batch = region_batch(frame, target, scales, input_rows, input_cols);
    const FeatureStack features = provider.extract_batch(batch, layer);
    std::vector<Eigen::VectorXd> columns;
    columns.reserve(features.depth());
    for (const auto& m : features.slices) columns.push_back(vectorize(m));
    return assemble(columns);
}

ScaleSample dsst_sample(const Frame& frame, const TargetGeometry& target, const ScaleSet& scales,
                        FeatureProvider& provider, const std::string& layer,
                        std::size_t input_rows, std::size_t input_cols) {
    const FrameBatch batch = region_batch(frame, target, scales, input_rows, input_cols);
    std::vector<Eigen::VectorXd> columns;
    columns.reserve(batch.depth());
    for (const auto& region : batch.slices) columns.push_back(vectorize(provider.extract(region, layer)));
    return assemble(columns);
}

ScaleSample taper_scale_axis(const ScaleSample& sample) {
    const auto d = static_cast<std::size_t>(sample.cols());
    const auto window = hann_window(d + 2);
    ScaleSample out = sample;
    for (std::size_t i = 0; i < d; ++i) out.col(static_cast<Eigen::Index>(i)) *= window[i + 1];
    return out;
}

std::vector<double> make_scale_label(std::size_t count, double sigma) {
    if (count < 1) throw InvalidInput("scale label: need at least one level");
    if (!(sigma > 0.0)) throw InvalidInput("scale label: sigma must be positive");
    const std::size_t center = build_scale_set(1.0, 1.0, 2.0, count).center_index();
    std::vector<double> y(count);
    for (std::size_t d = 0; d < count; ++d) {
        const std::size_t diff = d > center ? d - center : center - d;
        const auto dist = static_cast<double>(std::min(diff, count - diff));
        y[d] = std::exp(-dist * dist / (2.0 * sigma * sigma));
    }
    return y;
}

Eigen::MatrixXcd scale_spectrum(const ScaleSample& sample) {
    const Eigen::Index rows = sample.rows(), d = sample.cols();
    Eigen::MatrixXcd out(rows, d);
    std::vector<double> line(static_cast<std::size_t>(d));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) line[static_cast<std::size_t>(c)] = sample(r, c);
        const auto spec = fft(line);
        for (Eigen::Index c = 0; c < d; ++c) out(r, c) = spec[static_cast<std::size_t>(c)];
    }
    return out;
}

Eigen::MatrixXcd ScaleFilter::filter() const {
    Eigen::MatrixXcd h = numerator;
    for (Eigen::Index c = 0; c < h.cols(); ++c) h.col(c) /= denominator(c);
    return h;
}

ScaleFilter learn_scale_filter(const ScaleSample& sample, const Eigen::VectorXcd& label_spectrum,
                               double lambda) {
    if (sample.cols() != label_spectrum.size())
        throw InvalidInput("learn_scale_filter: sample and label disagree on the level count");
    if (!(lambda > 0.0)) throw InvalidInput("learn_scale_filter: lambda must be positive");
    const Eigen::MatrixXcd w = scale_spectrum(sample);
    ScaleFilter f;
    f.lambda = lambda;
    f.numerator = w.conjugate();
    for (Eigen::Index c = 0; c < w.cols(); ++c) f.numerator.col(c) *= label_spectrum(c);
    f.denominator = w.cwiseAbs2().colwise().sum().transpose();
    f.denominator.array() += lambda;
    return f;
}

ScaleFilter learn_scale_filter(const ScaleSample& sample, std::span<const double> label,
                               double lambda) {
    if (static_cast<std::size_t>(sample.cols()) != label.size())
        throw InvalidInput("learn_scale_filter: sample and label disagree on the level count");
    const auto spec = fft(label);
    Eigen::VectorXcd y(static_cast<Eigen::Index>(spec.size()));
    for (std::size_t i = 0; i < spec.size(); ++i) y(static_cast<Eigen::Index>(i)) = spec[i];
    return learn_scale_filter(sample, y, lambda);
}

void update_scale_model(ScaleFilter& model, const ScaleFilter& fresh, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidInput("update_scale_model: eta must be in [0, 1]");
    if (model.numerator.rows() != fresh.numerator.rows() ||
        model.numerator.cols() != fresh.numerator.cols())
        throw InvalidInput("update_scale_model: term dimensions differ");
    model.numerator = (1.0 - eta) * model.numerator + eta * fresh.numerator;
    model.denominator = (1.0 - eta) * model.denominator + eta * fresh.denominator;
}

std::vector<double> scale_confidence(const ScaleFilter& filter, const ScaleSample& z) {
    if (static_cast<std::size_t>(z.rows()) != filter.rows() ||
        static_cast<std::size_t>(z.cols()) != filter.levels())
        throw InvalidInput("detect_scale: test sample does not match the filter");
    const Eigen::MatrixXcd zs = scale_spectrum(z);
    const Eigen::VectorXcd summed =
        filter.numerator.cwiseProduct(zs).colwise().sum().transpose();
    std::vector<cdouble> e(static_cast<std::size_t>(summed.size()));
    for (Eigen::Index c = 0; c < summed.size(); ++c)
        e[static_cast<std::size_t>(c)] = summed(c) / filter.denominator(c);
    const auto spatial = ifft(e);
    std::vector<double> out(spatial.size());
    for (std::size_t i = 0; i < spatial.size(); ++i) out[i] = spatial[i].real();
    return out;
}

double refine_scale(std::span<const double> confidence, int iterations) {
    if (confidence.size() <= 1) return 0.0;
    return refine_peak(confidence, iterations).position;
}

ScaleResponse detect_scale(const ScaleFilter& filter, const ScaleSample& z, const ScaleSet& scales,
                           int newton_iterations) {
    if (static_cast<std::size_t>(z.cols()) != scales.size())
        throw InvalidInput("detect_scale: sample and scale set disagree on the level count");
    ScaleResponse r;
    r.confidence = scale_confidence(filter, z);
    bool any = false;
    for (double v : r.confidence) {
        if (!std::isfinite(v)) throw DegenerateResponse("scale confidence is not finite");
        any = any || v != 0.0;
    }
    if (!any) throw DegenerateResponse("scale confidence is all zero");
    if (scales.size() == 1) return r;
    const double pos = refine_scale(r.confidence, newton_iterations);
    r.level = static_cast<double>(scales.min_level()) + pos;
    r.factor = std::pow(scales.step, r.level);
    return r;
}

Eigen::VectorXcd shift_label_spectrum(const Eigen::VectorXcd& y, double shift) {
    const Eigen::Index n = y.size();
    Eigen::VectorXcd out = y;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (n % 2 == 0 && k == n / 2) {
            out(k) *= std::cos(std::numbers::pi * shift);
            continue;
        }
        const double f = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k - n);
        out(k) *= std::polar(1.0, -2.0 * std::numbers::pi * f * shift / static_cast<double>(n));
    }
    return out;
}

const char* to_string(ScaleMethod m) {
    switch (m) {
        case ScaleMethod::hrsem: return "hrsem";
        case ScaleMethod::rrsem: return "rrsem";
        case ScaleMethod::dsst: return "dsst";
    }
    return "?";
}

ScaleMethod parse_scale_method(const std::string& s) {
    if (s == "hrsem" || s == "HRSEM") return ScaleMethod::hrsem;
    if (s == "rrsem" || s == "RRSEM") return ScaleMethod::rrsem;
    if (s == "dsst" || s == "DSST" || s == "dsst-baseline" || s == "DSST-baseline")
        return ScaleMethod::dsst;
    throw InvalidInput("unknown scale method '" + s + "'");
}

void validate(const ScaleParams& p) {
    if (!(p.step > 1.0)) throw InvalidInput("scale: step must exceed 1");
    if (p.levels < 1) throw InvalidInput("scale: need at least one level");
    if (!(p.learning_rate >= 0.0 && p.learning_rate <= 1.0))
        throw InvalidInput("scale: learning rate must be in [0, 1]");
    if (!(p.sigma > 0.0)) throw InvalidInput("scale: sigma must be positive");
    if (p.newton_iterations < 0) throw InvalidInput("scale: Newton iterations must be >= 0");
    if (!(p.lambda > 0.0)) throw InvalidInput("scale: lambda must be positive");
    if (!(p.max_template_cells >= 4.0) || !(p.dsst_max_area >= 4.0))
        throw InvalidInput("scale: template area bounds too small");
}

const FeatureMap& FrameFeatures::full() {
    if (!full_) full_ = provider_.extract(frame_, layer_);
    return *full_;
}

ScaleEstimator::ScaleEstimator(ScaleMethod method, ScaleParams params, FeatureProvider& provider,
                               std::string layer, double base_width, double base_height)
    : method_(method), params_(params), provider_(provider), layer_(std::move(layer)) {
    validate(params_);
    if (!(base_width > 0.0 && base_height > 0.0))
        throw InvalidInput("scale estimator: base size must be positive");
    const LayerSpec* spec = provider_.descriptor().find(layer_);
    if (!spec) throw ContractError("scale estimator: provider has no layer '" + layer_ + "'");
    if (method_ == ScaleMethod::rrsem && !provider_.descriptor().supports_batch)
        throw ContractError("rrsem: provider does not support batched extraction");
    const double stride = spec->stride;

    if (method_ == ScaleMethod::dsst) {
        const double area = base_width * base_height;
        const double f = area > params_.dsst_max_area ? std::sqrt(params_.dsst_max_area / area) : 1.0;
        const auto min_px = static_cast<std::size_t>(2.0 * stride);
        input_cols_ = std::max(min_px, static_cast<std::size_t>(std::floor(base_width * f)));
        input_rows_ = std::max(min_px, static_cast<std::size_t>(std::floor(base_height * f)));
    } else {
        double cw = base_width / stride, ch = base_height / stride;
        const double area = cw * ch;
        if (area > params_.max_template_cells) {
            const double f = std::sqrt(params_.max_template_cells / area);
            cw *= f;
            ch *= f;
        }
        template_cols_ = at_least(cw, 2);
        template_rows_ = at_least(ch, 2);
        const auto& d = provider_.descriptor();
        if (method_ == ScaleMethod::rrsem && d.input_width > 0 && d.input_height > 0) {
            input_cols_ = d.input_width;
            input_rows_ = d.input_height;
        } else {
            input_cols_ = static_cast<std::size_t>(std::lround(static_cast<double>(template_cols_) * stride));
            input_rows_ = static_cast<std::size_t>(std::lround(static_cast<double>(template_rows_) * stride));
        }
    }

    const auto label = make_scale_label(params_.levels, params_.sigma);
    const auto spec_y = fft(label);
    label_spectrum_.resize(static_cast<Eigen::Index>(spec_y.size()));
    for (std::size_t i = 0; i < spec_y.size(); ++i)
        label_spectrum_(static_cast<Eigen::Index>(i)) = spec_y[i];
}

ScaleSample ScaleEstimator::sample(FrameFeatures& frame, const TargetGeometry& target) {
    const ScaleSet q = build_scale_set(target.width, target.height, params_.step, params_.levels);
    const Frame& f = frame.frame();
    switch (method_) {
        case ScaleMethod::hrsem:
            return hrsem_sample(frame.full(), static_cast<double>(f.width()),
                                static_cast<double>(f.height()), target, q,
                                template_rows_, template_cols_);
        case ScaleMethod::rrsem:
            return rrsem_sample(f, target, q, provider_, layer_, input_rows_, input_cols_);
        case ScaleMethod::dsst:
            return dsst_sample(f, target, q, provider_, layer_, input_rows_, input_cols_);
    }
    throw InvalidInput("scale estimator: unknown method");
}

ScaleFilter ScaleEstimator::learn(const ScaleSample& raw, double label_shift) const {
    const Eigen::VectorXcd y =
        label_shift == 0.0 ? label_spectrum_ : shift_label_spectrum(label_spectrum_, label_shift);
    return learn_scale_filter(taper_scale_axis(raw), y, params_.lambda);
}

void ScaleEstimator::init(FrameFeatures& frame, const TargetGeometry& target) {
    model_ = learn(sample(frame, target), 0.0);
    last_detect_sample_.reset();
}

ScaleResponse ScaleEstimator::detect(FrameFeatures& frame, const TargetGeometry& target) {
    ScaleSample z = sample(frame, target);
    const ScaleSet q = build_scale_set(target.width, target.height, params_.step, params_.levels);
    ScaleResponse r = detect_scale(model_, taper_scale_axis(z), q, params_.newton_iterations);
    last_detect_sample_ = std::move(z);
    return r;
}

void ScaleEstimator::update(FrameFeatures& frame, const TargetGeometry& target,
                            double detected_level) {
    ScaleFilter fresh;
    if (method_ == ScaleMethod::rrsem && last_detect_sample_) {
        fresh = learn(*last_detect_sample_, detected_level);
    } else {
        fresh = learn(sample(frame, target), 0.0);
    }
    last_detect_sample_.reset();
    update_scale_model(model_, fresh, params_.learning_rate);
}

} // namespace scaletrack
