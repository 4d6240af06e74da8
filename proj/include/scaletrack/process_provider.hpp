#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "scaletrack/provider.hpp"

namespace scaletrack {

/// Feature provider running as a child process, spoken to over its
/// stdin/stdout with the frames described in wire.hpp. Requests from
/// several threads are serialized.
class ProcessProvider final : public FeatureProvider {
public:
    /// Spawns argv[0] with the given arguments and reads its descriptor.
    explicit ProcessProvider(std::vector<std::string> argv);
    ~ProcessProvider() override;

protected:
    FeatureMap do_extract(const Frame& image, const LayerSpec& layer) override;
    FeatureStack do_extract_batch(const FrameBatch& batch, const LayerSpec& layer) override;

private:
    struct Child {
        int pid = -1;
        int to_child = -1;
        int from_child = -1;
    };
    explicit ProcessProvider(Child child);
    static Child spawn(const std::vector<std::string>& argv);
    static ProviderDescriptor handshake(const Child& child);

    std::uint32_t layer_index(const LayerSpec& layer) const;

    Child child_;
    std::mutex mutex_;
};

} // namespace scaletrack
