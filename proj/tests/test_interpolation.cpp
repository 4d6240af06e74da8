#include <doctest.h>

#include <cmath>

#include "scaletrack/errors.hpp"
#include "scaletrack/interpolation.hpp"
#include "scaletrack/oracles.hpp"

using namespace scaletrack;

namespace {

double max_abs(const Tensor& a, const Tensor& b) {
    REQUIRE(a.same_shape(b));
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

} // namespace

TEST_CASE("kernel interpolates and sums to one") {
    for (const double alpha : {-0.5, -0.75}) {
        const InterpolationKernel k{alpha};
        CHECK(k(0.0) == 1.0);
        CHECK(std::abs(k(1.0)) < 1e-15);
        CHECK(std::abs(k(-2.0)) < 1e-15);
        CHECK(k(2.5) == 0.0);
        for (double u = 0.0; u < 1.0; u += 0.0625)
            CHECK(std::abs(k(u + 1) + k(u) + k(u - 1) + k(u - 2) - 1.0) < 1e-9);
    }
}

TEST_CASE("same-size resample is the identity") {
    oracle::Random rng(1);
    const Tensor t = rng.tensor(8, 8, 3);
    CHECK(max_abs(resample(t, 8, 8), t) < 1e-12);
}

TEST_CASE("constant maps stay constant at any size") {
    const Tensor t(8, 6, 2, 3.25);
    for (auto [r, c] : {std::pair{8, 6}, {16, 12}, {3, 5}, {1, 1}, {29, 2}}) {
        const Tensor out = resample(t, static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        for (const double v : out.values()) CHECK(std::abs(v - 3.25) < 1e-9);
    }
}

TEST_CASE("linear ramps are reproduced away from the border") {
    Tensor ramp(8, 8);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) ramp(r, c) = static_cast<double>(r + c);
    const Tensor up = resample(ramp, 16, 16);
    for (std::size_t r = 3; r < 13; ++r)
        for (std::size_t c = 3; c < 13; ++c) {
            const double y = (static_cast<double>(r) + 0.5) * 0.5 - 0.5;
            const double x = (static_cast<double>(c) + 0.5) * 0.5 - 0.5;
            CHECK(std::abs(up(r, c) - (x + y)) < 1e-6);
        }
}

TEST_CASE("crop of the full map is the identity") {
    oracle::Random rng(2);
    const Tensor t = rng.tensor(7, 9, 2);
    CHECK(max_abs(crop_and_resample(t, CropOperator{{0, 0, 9, 7}}, 7, 9), t) < 1e-12);
}

TEST_CASE("crop of a constant map is constant") {
    const Tensor t(10, 10, 1, -2.0);
    const Tensor out = crop_and_resample(t, CropOperator{{3, 3, 4, 4}}, 8, 8);
    for (const double v : out.values()) CHECK(std::abs(v + 2.0) < 1e-12);
}

TEST_CASE("aligned crop equals resampling the extracted sub-array") {
    oracle::Random rng(3);
    const Tensor src = rng.tensor(12, 12, 2);
    Tensor sub(4, 4, 2);
    for (std::size_t ch = 0; ch < 2; ++ch)
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) sub(r, c, ch) = src(r + 5, c + 3, ch);
    CHECK(max_abs(crop_and_resample(src, CropOperator{{3.0, 5.0, 4.0, 4.0}}, 8, 8), resample(sub, 8, 8)) < 1e-9);
}

TEST_CASE("crop and resample is linear and commutes with channel permutation") {
    oracle::Random rng(4);
    const Tensor a = rng.tensor(10, 11, 3), b = rng.tensor(10, 11, 3);
    const CropOperator crop{{1.3, 2.7, 6.1, 5.4}};
    Tensor sum(10, 11, 3), perm(10, 11, 3);
    for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] = 2.0 * a.data()[i] - 0.5 * b.data()[i];
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t r = 0; r < 10; ++r)
            for (std::size_t c = 0; c < 11; ++c) perm(r, c, ch) = a(r, c, (ch + 1) % 3);

    const Tensor ra = crop_and_resample(a, crop, 7, 5), rb = crop_and_resample(b, crop, 7, 5);
    const Tensor rs = crop_and_resample(sum, crop, 7, 5), rp = crop_and_resample(perm, crop, 7, 5);
    double lin = 0.0, per = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i)
        lin = std::max(lin, std::abs(rs.data()[i] - (2.0 * ra.data()[i] - 0.5 * rb.data()[i])));
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t r = 0; r < 7; ++r)
            for (std::size_t c = 0; c < 5; ++c) per = std::max(per, std::abs(rp(r, c, ch) - ra(r, c, (ch + 1) % 3)));
    CHECK(lin < 1e-12);
    CHECK(per == 0.0);
}

TEST_CASE("crop masks round half away from zero and grow degenerate windows") {
    CHECK(CropOperator{{1.5, 2.5, 3.0, 3.0}}.mask() == CropMask{3, 6, 2, 5});
    CHECK(CropOperator{{-1.5, 0.0, 2.0, 2.0}}.mask() == CropMask{0, 2, -2, 1});
    CHECK(CropOperator{{4.2, 4.2, 0.5, 0.5}}.mask() == CropMask{4, 6, 4, 6});
    const Tensor plane = CropOperator{{1.0, 1.0, 2.0, 2.0}}.mask_plane(4, 4);
    CHECK(plane(1, 1) == 1.0);
    CHECK(plane(2, 2) == 1.0);
    CHECK(plane(0, 0) == 0.0);
    CHECK(plane(3, 2) == 0.0);
}

TEST_CASE("crops past the border replicate the edge") {
    Tensor t(4, 4);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) t(r, c) = static_cast<double>(c);
    // The confined window covers columns -2..0, so only col 0 exists inside it.
    const Tensor out = crop_and_resample(t, CropOperator{{-1.5, 0.0, 2.0, 4.0}}, 4, 2);
    for (const double v : out.values()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("unconfined crops vary continuously with the rectangle") {
    oracle::Random rng(5);
    const Tensor t = rng.tensor(16, 16, 1);
    // Crossing the half-cell rounding boundary of the mask must not jump.
    const Tensor a = crop_and_resample(t, CropOperator{{3.4999, 3.0, 6.0, 6.0}, false}, 6, 6);
    const Tensor b = crop_and_resample(t, CropOperator{{3.5001, 3.0, 6.0, 6.0}, false}, 6, 6);
    CHECK(max_abs(a, b) < 1e-3);
}

TEST_CASE("invalid crops") {
    const Tensor t(6, 6);
    CHECK_THROWS_AS(resample(t, 0, 3), InvalidInput);
    CHECK_THROWS_AS(resample(Tensor{}, 3, 3), InvalidInput);
    CHECK_THROWS_AS(crop_and_resample(t, CropOperator{{10, 10, 2, 2}}, 2, 2), InvalidInput);
    CHECK_THROWS_AS(crop_and_resample(t, CropOperator{{1, 1, 0, 2}}, 2, 2), InvalidInput);
}
