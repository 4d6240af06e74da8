#pragma once

// Length-prefixed binary frames exchanged with out-of-process feature
// providers. All integers are little-endian u32.
//
//   frame   := length  element_type  tag  ndims  dims[ndims]  payload
//   length  := byte count of everything after the length field
//   element_type 0 -> payload is raw bytes (UTF-8 text, e.g. JSON)
//   element_type 1 -> payload is row-major float32, product(dims) values
//
// Session: the provider first sends its descriptor as a bytes frame. Each
// request is a float32 frame with dims [D, H, W, C] and tag = index of the
// requested layer in the descriptor. The reply is a float32 frame with dims
// [D, H', W', G] and tag 0, or a bytes frame with tag 1 carrying an error
// message.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scaletrack/tensor.hpp"

namespace scaletrack::wire {

enum class ElementType : std::uint32_t { bytes = 0, float32 = 1 };

inline constexpr std::uint32_t kTagOk = 0;
inline constexpr std::uint32_t kTagError = 1;

struct Message {
    ElementType type = ElementType::float32;
    std::uint32_t tag = 0;
    std::vector<std::uint32_t> dims;
    std::vector<float> values;  // float32 payload
    std::string bytes;          // bytes payload

    bool operator==(const Message&) const = default;
};

std::vector<std::uint8_t> encode(const Message& m);
/// Decodes one complete frame (including its length prefix). Throws
/// InvalidInput on truncated or inconsistent input.
Message decode(std::span<const std::uint8_t> frame);

/// Blocking I/O on a file descriptor. Throw ProviderError on failure/EOF.
void write_message(int fd, const Message& m);
Message read_message(int fd);

/// [D, H, W, C] float32 tensor of a batch of equally sized tensors.
Message pack(std::span<const Tensor> batch, std::uint32_t tag);
std::vector<Tensor> unpack(const Message& m);

} // namespace scaletrack::wire
