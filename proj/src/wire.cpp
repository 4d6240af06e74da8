#include "scaletrack/wire.hpp"

#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "scaletrack/errors.hpp"

namespace scaletrack::wire {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw InvalidInput("wire: truncated frame");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
    pos += 4;
    return v;
}

std::size_t element_count(const std::vector<std::uint32_t>& dims) {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

void write_all(int fd, const std::uint8_t* data, std::size_t n) {
    while (n > 0) {
        const ssize_t w = ::write(fd, data, n);
        if (w < 0) {
            if (errno == EINTR) continue;
            throw ProviderError(std::string("wire: write failed: ") + std::strerror(errno));
        }
        data += w;
        n -= static_cast<std::size_t>(w);
    }
}

void read_all(int fd, std::uint8_t* data, std::size_t n) {
    while (n > 0) {
        const ssize_t r = ::read(fd, data, n);
        if (r < 0) {
            if (errno == EINTR) continue;
            throw ProviderError(std::string("wire: read failed: ") + std::strerror(errno));
        }
        if (r == 0) throw ProviderError("wire: peer closed the stream");
        data += r;
        n -= static_cast<std::size_t>(r);
    }
}

} // namespace

std::vector<std::uint8_t> encode(const Message& m) {
    std::vector<std::uint8_t> body;
    put_u32(body, static_cast<std::uint32_t>(m.type));
    put_u32(body, m.tag);
    put_u32(body, static_cast<std::uint32_t>(m.dims.size()));
    for (auto d : m.dims) put_u32(body, d);
    if (m.type == ElementType::float32) {
        if (m.values.size() != element_count(m.dims))
            throw InvalidInput("wire: payload size does not match dims");
        for (float f : m.values) {
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            put_u32(body, bits);
        }
    } else {
        body.insert(body.end(), m.bytes.begin(), m.bytes.end());
    }
    std::vector<std::uint8_t> out;
    out.reserve(body.size() + 4);
    put_u32(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Message decode(std::span<const std::uint8_t> frame) {
    std::size_t pos = 0;
    const std::uint32_t length = get_u32(frame, pos);
    if (frame.size() != static_cast<std::size_t>(length) + 4)
        throw InvalidInput("wire: length prefix does not match frame size");
    Message m;
    const std::uint32_t type = get_u32(frame, pos);
    if (type > 1) throw InvalidInput("wire: unknown element type");
    m.type = static_cast<ElementType>(type);
    m.tag = get_u32(frame, pos);
    const std::uint32_t ndims = get_u32(frame, pos);
    if (ndims > 16) throw InvalidInput("wire: too many dimensions");
    for (std::uint32_t i = 0; i < ndims; ++i) m.dims.push_back(get_u32(frame, pos));
    const std::size_t rest = frame.size() - pos;
    if (m.type == ElementType::float32) {
        const std::size_t n = element_count(m.dims);
        if (rest != n * 4) throw InvalidInput("wire: float payload size does not match dims");
        m.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t bits = get_u32(frame, pos);
            std::memcpy(&m.values[i], &bits, 4);
        }
    } else {
        m.bytes.assign(reinterpret_cast<const char*>(frame.data() + pos), rest);
    }
    return m;
}

void write_message(int fd, const Message& m) {
    const auto bytes = encode(m);
    write_all(fd, bytes.data(), bytes.size());
}

Message read_message(int fd) {
    std::uint8_t prefix[4];
    read_all(fd, prefix, 4);
    std::uint32_t length = 0;
    for (int i = 0; i < 4; ++i) length |= static_cast<std::uint32_t>(prefix[i]) << (8 * i);
    if (length > (1u << 30)) throw ProviderError("wire: frame too large");
    std::vector<std::uint8_t> frame(static_cast<std::size_t>(length) + 4);
    std::memcpy(frame.data(), prefix, 4);
    read_all(fd, frame.data() + 4, length);
    try {
        return decode(frame);
    } catch (const InvalidInput& e) {
        throw ProviderError(e.what());
    }
}

Message pack(std::span<const Tensor> batch, std::uint32_t tag) {
    if (batch.empty()) throw InvalidInput("wire: empty batch");
    const Tensor& first = batch.front();
    Message m;
    m.type = ElementType::float32;
    m.tag = tag;
    m.dims = {static_cast<std::uint32_t>(batch.size()), static_cast<std::uint32_t>(first.rows()),
              static_cast<std::uint32_t>(first.cols()),
              static_cast<std::uint32_t>(first.channels())};
    m.values.reserve(batch.size() * first.size());
    for (const Tensor& t : batch) {
        if (!t.same_shape(first)) throw InvalidInput("wire: batch entries differ in shape");
        for (std::size_t r = 0; r < t.rows(); ++r)
            for (std::size_t c = 0; c < t.cols(); ++c)
                for (std::size_t ch = 0; ch < t.channels(); ++ch)
                    m.values.push_back(static_cast<float>(t(r, c, ch)));
    }
    return m;
}

std::vector<Tensor> unpack(const Message& m) {
    if (m.type != ElementType::float32 || m.dims.size() != 4)
        throw InvalidInput("wire: expected a 4D float32 tensor");
    const std::size_t depth = m.dims[0], rows = m.dims[1], cols = m.dims[2], chans = m.dims[3];
    std::vector<Tensor> out;
    out.reserve(depth);
    std::size_t i = 0;
    for (std::size_t d = 0; d < depth; ++d) {
        Tensor t(rows, cols, chans);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                for (std::size_t ch = 0; ch < chans; ++ch) t(r, c, ch) = m.values[i++];
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace scaletrack::wire
