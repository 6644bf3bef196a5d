#include <doctest.h>

#include "siclab/fft.hpp"
#include "support.hpp"

using namespace siclab;

TEST_SUITE("fft") {

TEST_CASE("forward then inverse returns N times the input") {
    for (std::size_t n : {1u, 8u, 64u, 1000u, 1024u}) {
        const auto x = testsupport::random_vector(n, n);
        ComplexVector y = x;
        fft::forward(y);
        fft::inverse(y);
        for (auto& v : y) v /= static_cast<double>(n);
        CHECK(testsupport::max_abs_diff(x, y) < 1e-12);
    }
}

TEST_CASE("forward matches the DFT definition") {
    const auto x = testsupport::random_vector(12, 7);
    ComplexVector y = x;
    fft::forward(y);
    for (std::size_t k = 0; k < x.size(); ++k) {
        Complex acc{};
        for (std::size_t n = 0; n < x.size(); ++n) acc += x[n] * std::polar(1.0, -2.0 * M_PI * double(k * n) / 12.0);
        CHECK(std::abs(acc - y[k]) < 1e-12);
    }
}

TEST_CASE("cross_correlate equals the direct lag sum") {
    const auto ref = testsupport::random_vector(37, 1);
    const auto sig = testsupport::random_vector(120, 2);
    const std::size_t max_lag = 100;
    const auto c = fft::cross_correlate(ref, sig, max_lag);
    REQUIRE(c.size() == max_lag + 1);
    for (std::size_t d = 0; d <= max_lag; ++d) {
        Complex acc{};
        for (std::size_t n = 0; n < ref.size() && n + d < sig.size(); ++n) acc += std::conj(ref[n]) * sig[n + d];
        CHECK(std::abs(acc - c[d]) < 1e-10);
    }
}

TEST_CASE("next_pow2") {
    CHECK(fft::next_pow2(1) == 1);
    CHECK(fft::next_pow2(5) == 8);
    CHECK(fft::next_pow2(1024) == 1024);
    CHECK(fft::next_pow2(1025) == 2048);
}

}
