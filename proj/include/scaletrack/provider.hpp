#pragma once

#include <atomic>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaletrack/hog.hpp"
#include "scaletrack/tensor.hpp"

namespace scaletrack {

struct LayerSpec {
    std::string id;
    double stride = 1.0;       // pixels per output cell
    std::size_t channels = 1;  // G
};

struct ProviderDescriptor {
    std::string name;
    std::vector<LayerSpec> layers;
    // Preferred input resolution in pixels; 0 means any size is accepted.
    std::size_t input_width = 0;
    std::size_t input_height = 0;
    bool supports_batch = false;

    const LayerSpec* find(std::string_view layer_id) const;
};

void validate(const ProviderDescriptor& d);
void to_json(nlohmann::json& j, const ProviderDescriptor& d);
void from_json(const nlohmann::json& j, ProviderDescriptor& d);

/// Maps images to feature maps under the stride/channel contract declared by
/// its descriptor. The public entry points validate requests and results and
/// count invocations; subclasses implement the do_* hooks.
class FeatureProvider {
public:
    virtual ~FeatureProvider() = default;
    FeatureProvider(const FeatureProvider&) = delete;
    FeatureProvider& operator=(const FeatureProvider&) = delete;

    const ProviderDescriptor& descriptor() const { return descriptor_; }

    /// One map per requested layer, in request order.
    std::vector<FeatureMap> extract(const Frame& image, std::span<const std::string> layer_ids);
    FeatureMap extract(const Frame& image, const std::string& layer_id);

    /// Batched extraction: slice d of the result equals extract(batch[d]).
    FeatureStack extract_batch(const FrameBatch& batch, const std::string& layer_id);

    /// Number of extract + extract_batch calls since construction/reset.
    std::size_t invocations() const { return single_calls_ + batch_calls_; }
    std::size_t single_invocations() const { return single_calls_; }
    std::size_t batch_invocations() const { return batch_calls_; }
    void reset_counters() {
        single_calls_ = 0;
        batch_calls_ = 0;
    }

protected:
    explicit FeatureProvider(ProviderDescriptor descriptor);

    virtual FeatureMap do_extract(const Frame& image, const LayerSpec& layer) = 0;
    /// Default implementation loops over do_extract.
    virtual FeatureStack do_extract_batch(const FrameBatch& batch, const LayerSpec& layer);

private:
    const LayerSpec& require_layer(const std::string& id) const;
    void check_output(const FeatureMap& map, const LayerSpec& layer, const Frame& image) const;

    ProviderDescriptor descriptor_;
    std::atomic<std::size_t> single_calls_{0};
    std::atomic<std::size_t> batch_calls_{0};
};

/// Expected output grid for an input of the given size.
std::size_t output_extent(std::size_t pixels, double stride);

/// Cell size of the "hog-fine" layer: half the configured cell, at least 1.
int fine_cell(const HogConfig& cfg);

/// HOG as a provider: layer "hog" with stride = cell size and layer
/// "hog-fine" with stride = fine_cell(cfg).
class HogProvider final : public FeatureProvider {
public:
    explicit HogProvider(HogConfig cfg = {});
    const HogConfig& config() const { return cfg_; }

protected:
    FeatureMap do_extract(const Frame& image, const LayerSpec& layer) override;

private:
    HogConfig cfg_;
};

/// Deterministic stand-in for a pretrained network. Each layer average-pools
/// the image over stride x stride blocks and emits channel g as
/// (1 + g / C) * pooled[g % C], so a stride-1 layer with G == C is the
/// identity map (linear and commuting with crops).
class MockProvider final : public FeatureProvider {
public:
    explicit MockProvider(ProviderDescriptor descriptor);

    /// Single layer "identity": stride 1, G = channels, batch supported.
    static std::unique_ptr<MockProvider> identity(std::size_t channels = 1);

    /// Makes the next call throw ProviderError (failure-path testing).
    void fail_next_call() { fail_next_ = true; }

protected:
    FeatureMap do_extract(const Frame& image, const LayerSpec& layer) override;

private:
    bool fail_next_ = false;
};

/// Builds a provider from a selector string: "hog", "mock", "identity" or
/// "process:<command line>".
std::unique_ptr<FeatureProvider> make_provider(const std::string& selector, const HogConfig& hog = {});

} // namespace scaletrack
