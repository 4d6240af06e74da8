#include "scaletrack/process_provider.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "scaletrack/errors.hpp"
#include "scaletrack/wire.hpp"

namespace scaletrack {

ProcessProvider::Child ProcessProvider::spawn(const std::vector<std::string>& argv) {
    if (argv.empty()) throw InvalidInput("process provider: empty command");
    // A dead child must surface as ProviderError from write(), not kill us.
    ::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0) throw ProviderError("process provider: pipe() failed");
    if (::pipe(out_pipe) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw ProviderError("process provider: pipe() failed");
    }
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) throw ProviderError("process provider: fork() failed");
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    return {pid, in_pipe[1], out_pipe[0]};
}

ProviderDescriptor ProcessProvider::handshake(const Child& child) {
    try {
        wire::Message hello = wire::read_message(child.from_child);
        if (hello.type != wire::ElementType::bytes)
            throw ProviderError("process provider: expected a descriptor frame");
        try {
            return nlohmann::json::parse(hello.bytes).get<ProviderDescriptor>();
        } catch (const std::exception& e) {
            throw ProviderError(std::string("process provider: bad descriptor: ") + e.what());
        }
    } catch (...) {
        ::close(child.to_child);
        ::close(child.from_child);
        ::kill(child.pid, SIGTERM);
        ::waitpid(child.pid, nullptr, 0);
        throw;
    }
}

ProcessProvider::ProcessProvider(std::vector<std::string> argv) : ProcessProvider(spawn(argv)) {}

// The descriptor is read from the child before the base class is initialised.
ProcessProvider::ProcessProvider(Child child)
    : FeatureProvider(handshake(child)), child_(child) {}

ProcessProvider::~ProcessProvider() {
    if (child_.to_child >= 0) ::close(child_.to_child);
    if (child_.from_child >= 0) ::close(child_.from_child);
    if (child_.pid > 0) ::waitpid(child_.pid, nullptr, 0);
}

std::uint32_t ProcessProvider::layer_index(const LayerSpec& layer) const {
    const auto& layers = descriptor().layers;
    for (std::size_t i = 0; i < layers.size(); ++i)
        if (layers[i].id == layer.id) return static_cast<std::uint32_t>(i);
    throw ContractError("process provider: unknown layer " + layer.id);
}

FeatureStack ProcessProvider::do_extract_batch(const FrameBatch& batch, const LayerSpec& layer) {
    std::vector<Tensor> tensors;
    tensors.reserve(batch.depth());
    for (const auto& f : batch.slices) tensors.push_back(f.pixels());

    wire::Message reply;
    {
        std::lock_guard lock(mutex_);
        wire::write_message(child_.to_child, wire::pack(tensors, layer_index(layer)));
        reply = wire::read_message(child_.from_child);
    }
    if (reply.type == wire::ElementType::bytes || reply.tag == wire::kTagError)
        throw ProviderError("process provider: " + reply.bytes);
    std::vector<Tensor> maps;
    try {
        maps = wire::unpack(reply);
    } catch (const InvalidInput& e) {
        throw ProviderError(std::string("process provider: ") + e.what());
    }
    FeatureStack out;
    for (auto& t : maps) out.slices.push_back({std::move(t), layer.stride});
    return out;
}

FeatureMap ProcessProvider::do_extract(const Frame& image, const LayerSpec& layer) {
    FrameBatch single{{image}};
    FeatureStack s = do_extract_batch(single, layer);
    if (s.depth() != 1) throw ProviderError("process provider: expected one map");
    return std::move(s.slices.front());
}

} // namespace scaletrack
