#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace scaletrack {

using cdouble = std::complex<double>;

/// Dense rows x cols x channels array, stored channel-planar: each channel is
/// a contiguous row-major plane.
template <typename T>
class BasicTensor {
public:
    BasicTensor() = default;
    BasicTensor(std::size_t rows, std::size_t cols, std::size_t channels = 1, T fill = T{})
        : rows_(rows), cols_(cols), channels_(channels), data_(rows * cols * channels, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t channels() const { return channels_; }
    std::size_t plane_size() const { return rows_ * cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool same_shape(const BasicTensor& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && channels_ == o.channels_;
    }
    template <typename U>
    bool same_shape(const BasicTensor<U>& o) const {
        return rows_ == o.rows() && cols_ == o.cols() && channels_ == o.channels();
    }

    T& operator()(std::size_t r, std::size_t c, std::size_t ch = 0) {
        return data_[(ch * rows_ + r) * cols_ + c];
    }
    const T& operator()(std::size_t r, std::size_t c, std::size_t ch = 0) const {
        return data_[(ch * rows_ + r) * cols_ + c];
    }

    std::span<T> channel(std::size_t ch) { return {data_.data() + ch * plane_size(), plane_size()}; }
    std::span<const T> channel(std::size_t ch) const {
        return {data_.data() + ch * plane_size(), plane_size()};
    }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }
    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    bool operator==(const BasicTensor&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t channels_ = 0;
    std::vector<T> data_;
};

using Tensor = BasicTensor<double>;
using CTensor = BasicTensor<cdouble>;

bool all_finite(const Tensor& t);
double squared_norm(const Tensor& t);
double squared_norm(const CTensor& t);

/// Video frame: intensities in [0,1], one or three channels.
class Frame {
public:
    Frame() = default;
    /// Throws InvalidInput unless the tensor is non-empty, has 1 or 3
    /// channels and only finite values.
    explicit Frame(Tensor pixels);

    std::size_t width() const { return pixels_.cols(); }
    std::size_t height() const { return pixels_.rows(); }
    std::size_t channels() const { return pixels_.channels(); }
    const Tensor& pixels() const { return pixels_; }

    bool operator==(const Frame&) const = default;

private:
    Tensor pixels_;
};

/// Multi-channel feature tensor with its sampling stride relative to the
/// source image (pixels per cell).
struct FeatureMap {
    Tensor data;
    double stride = 1.0;

    std::size_t rows() const { return data.rows(); }
    std::size_t cols() const { return data.cols(); }
    std::size_t channels() const { return data.channels(); }
};

/// Checks the FeatureMap invariants (G >= 1, stride >= 1, finite values).
void validate(const FeatureMap& map);

/// Four-dimensional stack: `slices[d]` is one rows x cols x channels entry.
template <typename T>
struct Stack {
    std::vector<T> slices;
    std::size_t depth() const { return slices.size(); }
};

using FrameBatch = Stack<Frame>;
using FeatureStack = Stack<FeatureMap>;

} // namespace scaletrack
