#include "scaletrack/provider.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scaletrack/errors.hpp"
#include "scaletrack/process_provider.hpp"

namespace scaletrack {

const LayerSpec* ProviderDescriptor::find(std::string_view layer_id) const {
    for (const auto& l : layers)
        if (l.id == layer_id) return &l;
    return nullptr;
}

void validate(const ProviderDescriptor& d) {
    if (d.layers.empty()) throw InvalidInput("provider descriptor: no layers");
    for (const auto& l : d.layers) {
        if (!(l.stride >= 1.0)) throw InvalidInput("provider descriptor: stride must be >= 1");
        if (l.channels < 1) throw InvalidInput("provider descriptor: channels must be >= 1");
    }
}

void to_json(nlohmann::json& j, const ProviderDescriptor& d) {
    j = nlohmann::json::object();
    j["name"] = d.name;
    auto layers = nlohmann::json::array();
    for (const auto& l : d.layers)
        layers.push_back({{"id", l.id}, {"stride", l.stride}, {"channels", l.channels}});
    j["layers"] = layers;
    j["input_size"] = {d.input_width, d.input_height};
    j["supports_batch"] = d.supports_batch;
}

void from_json(const nlohmann::json& j, ProviderDescriptor& d) {
    d.name = j.at("name").get<std::string>();
    d.layers.clear();
    for (const auto& l : j.at("layers"))
        d.layers.push_back({l.at("id").get<std::string>(), l.at("stride").get<double>(),
                            l.at("channels").get<std::size_t>()});
    if (j.contains("input_size")) {
        d.input_width = j["input_size"].at(0).get<std::size_t>();
        d.input_height = j["input_size"].at(1).get<std::size_t>();
    }
    d.supports_batch = j.value("supports_batch", false);
    validate(d);
}

std::size_t output_extent(std::size_t pixels, double stride) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(pixels) / stride + 1e-9));
}

FeatureProvider::FeatureProvider(ProviderDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
    validate(descriptor_);
}

const LayerSpec& FeatureProvider::require_layer(const std::string& id) const {
    const LayerSpec* l = descriptor_.find(id);
    if (!l) throw ContractError("provider '" + descriptor_.name + "' has no layer '" + id + "'");
    return *l;
}

void FeatureProvider::check_output(const FeatureMap& map, const LayerSpec& layer,
                                   const Frame& image) const {
    const bool ok = map.channels() == layer.channels && map.stride == layer.stride &&
                    map.rows() == output_extent(image.height(), layer.stride) &&
                    map.cols() == output_extent(image.width(), layer.stride) &&
                    all_finite(map.data);
    if (!ok)
        throw ProviderError("provider '" + descriptor_.name + "' returned a map for layer '" +
                            layer.id + "' that breaks its descriptor");
}

std::vector<FeatureMap> FeatureProvider::extract(const Frame& image,
                                                 std::span<const std::string> layer_ids) {
    std::vector<const LayerSpec*> layers;
    for (const auto& id : layer_ids) layers.push_back(&require_layer(id));
    ++single_calls_;
    std::vector<FeatureMap> out;
    out.reserve(layers.size());
    for (const LayerSpec* l : layers) {
        out.push_back(do_extract(image, *l));
        check_output(out.back(), *l, image);
    }
    return out;
}

FeatureMap FeatureProvider::extract(const Frame& image, const std::string& layer_id) {
    const std::string ids[] = {layer_id};
    return std::move(extract(image, ids).front());
}

FeatureStack FeatureProvider::extract_batch(const FrameBatch& batch, const std::string& layer_id) {
    if (!descriptor_.supports_batch)
        throw ContractError("provider '" + descriptor_.name + "' does not support batches");
    const LayerSpec& layer = require_layer(layer_id);
    if (batch.slices.empty()) throw InvalidInput("extract_batch: empty batch");
    const Frame& first = batch.slices.front();
    for (const auto& f : batch.slices)
        if (f.width() != first.width() || f.height() != first.height() ||
            f.channels() != first.channels())
            throw InvalidInput("extract_batch: batch entries have different dimensions");
    ++batch_calls_;
    FeatureStack out = do_extract_batch(batch, layer);
    if (out.depth() != batch.depth())
        throw ProviderError("provider '" + descriptor_.name + "' returned wrong batch depth");
    for (const auto& m : out.slices) check_output(m, layer, first);
    return out;
}

FeatureStack FeatureProvider::do_extract_batch(const FrameBatch& batch, const LayerSpec& layer) {
    FeatureStack out;
    out.slices.reserve(batch.depth());
    for (const auto& f : batch.slices) out.slices.push_back(do_extract(f, layer));
    return out;
}

int fine_cell(const HogConfig& cfg) { return std::max(1, cfg.cell_size / 2); }

HogProvider::HogProvider(HogConfig cfg)
    : FeatureProvider([&] {
          validate(cfg);
          ProviderDescriptor d;
          d.name = "hog";
          const auto channels = static_cast<std::size_t>(cfg.channels);
          d.layers = {{"hog", static_cast<double>(cfg.cell_size), channels},
                      {"hog-fine", static_cast<double>(fine_cell(cfg)), channels}};
          d.supports_batch = true;
          return d;
      }()),
      cfg_(cfg) {}

FeatureMap HogProvider::do_extract(const Frame& image, const LayerSpec& layer) {
    if (layer.id == "hog") return hog_extract(image, cfg_);
    HogConfig fine = cfg_;
    fine.cell_size = fine_cell(cfg_);
    return hog_extract(image, fine);
}

MockProvider::MockProvider(ProviderDescriptor descriptor)
    : FeatureProvider(std::move(descriptor)) {}

std::unique_ptr<MockProvider> MockProvider::identity(std::size_t channels) {
    ProviderDescriptor d;
    d.name = "mock-identity";
    d.layers = {{"identity", 1.0, channels}};
    d.supports_batch = true;
    return std::make_unique<MockProvider>(std::move(d));
}

FeatureMap MockProvider::do_extract(const Frame& image, const LayerSpec& layer) {
    if (fail_next_) {
        fail_next_ = false;
        throw ProviderError("mock provider: injected failure");
    }
    const Tensor& px = image.pixels();
    const std::size_t rows = output_extent(px.rows(), layer.stride);
    const std::size_t cols = output_extent(px.cols(), layer.stride);
    if (rows == 0 || cols == 0) throw InvalidInput("mock provider: image smaller than stride");
    const auto s = static_cast<std::size_t>(layer.stride);
    const std::size_t nc = px.channels();

    Tensor pooled(rows, cols, nc);
    const double inv = 1.0 / static_cast<double>(s * s);
    for (std::size_t ch = 0; ch < nc; ++ch)
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                double sum = 0.0;
                for (std::size_t i = 0; i < s; ++i)
                    for (std::size_t j = 0; j < s; ++j) sum += px(r * s + i, c * s + j, ch);
                pooled(r, c, ch) = sum * inv;
            }

    FeatureMap out{Tensor(rows, cols, layer.channels), layer.stride};
    for (std::size_t g = 0; g < layer.channels; ++g) {
        const double gain = 1.0 + static_cast<double>(g / nc);
        auto src = pooled.channel(g % nc);
        auto dst = out.data.channel(g);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = gain * src[i];
    }
    return out;
}

std::unique_ptr<FeatureProvider> make_provider(const std::string& selector, const HogConfig& hog) {
    if (selector == "hog") return std::make_unique<HogProvider>(hog);
    if (selector == "identity") return MockProvider::identity(1);
    if (selector == "mock") {
        ProviderDescriptor d;
        d.name = "mock";
        d.layers = {{"conv-2", 2.0, 16}, {"conv-3", 4.0, 32}, {"conv-4", 8.0, 96}};
        d.supports_batch = true;
        return std::make_unique<MockProvider>(std::move(d));
    }
    if (selector.rfind("process:", 0) == 0) {
        std::istringstream in(selector.substr(8));
        std::vector<std::string> argv;
        for (std::string tok; in >> tok;) argv.push_back(tok);
        if (argv.empty()) throw InvalidInput("provider selector 'process:' needs a command");
        return std::make_unique<ProcessProvider>(std::move(argv));
    }
    throw InvalidInput("unknown provider selector '" + selector + "'");
}

} // namespace scaletrack
