#include <doctest.h>

#include <random>

#include "siclab/metrics.hpp"
#include "support.hpp"

using namespace siclab;
using namespace siclab::metrics;

namespace {

IqBuffer buf(ComplexVector v) { return IqBuffer(std::move(v), 1.0); }

ResourceGrid grid_of(const Eigen::MatrixXcd& m) {
    ResourceGrid g(m.rows(), m.cols());
    g.values = m;
    return g;
}

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1U);
    return b;
}

/// Two-pass EVM oracle in long double.
double evm_oracle(const ComplexVector& s, const ComplexVector& r) {
    long double num = 0.0L, den = 0.0L;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const long double dr = s[i].real() - r[i].real(), di = s[i].imag() - r[i].imag();
        num += dr * dr + di * di;
    }
    for (const auto& v : r) den += static_cast<long double>(v.real()) * v.real() + static_cast<long double>(v.imag()) * v.imag();
    return static_cast<double>(100.0L * std::sqrt(num / den));
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("evm_rms examples") {
    const auto r = testsupport::random_vector(1000, 1);
    CHECK(evm_rms(r, r) == 0.0);
    ComplexVector s = r;
    for (auto& v : s) v *= 1.1;
    CHECK(evm_rms(s, r) == doctest::Approx(10.0).epsilon(1e-12));
    const auto x = testsupport::random_vector(1000, 2);
    CHECK(evm_rms(x, r) == doctest::Approx(evm_oracle(x, r)).epsilon(1e-10));
}

TEST_CASE("evm_rms scale invariance and errors") {
    const auto r = testsupport::random_vector(500, 3);
    const auto s = testsupport::random_vector(500, 4);
    const Complex c(-3.0, 0.25);
    ComplexVector cr = r, cs = s;
    for (auto& v : cr) v *= c;
    for (auto& v : cs) v *= c;
    CHECK(evm_rms(cs, cr) == doctest::Approx(evm_rms(s, r)).epsilon(1e-12));
    CHECK_THROWS_AS((void)evm_rms(ComplexVector(5), ComplexVector(5)), DegenerateInputError);
    CHECK_THROWS_AS((void)evm_rms(ComplexVector(5), ComplexVector(6, 1.0)), InputError);
    CHECK_THROWS_AS((void)evm_rms(ComplexVector{}, ComplexVector{}), InputError);
}

TEST_CASE("ber examples") {
    const auto tx = random_bits(1000, 5);
    CHECK(ber(tx, tx).ratio == 0.0);
    auto inv = tx;
    for (auto& b : inv) b ^= 1U;
    CHECK(ber(inv, tx).ratio == 1.0);
    const auto a = random_bits(100000, 6);
    const auto b = random_bits(100000, 7);
    CHECK(std::abs(ber(a, b).ratio - 0.5) < 0.01);
    CHECK(ber(a, b).ratio == ber(b, a).ratio);
    CHECK(ber(a, b).compared == 100000);
}

TEST_CASE("ber alignment search finds the shift") {
    const auto tx = random_bits(2000, 8);
    const std::vector<std::uint8_t> rx(tx.begin() + 6, tx.end());  // rx[i] = tx[i + 6]
    const auto r = ber(rx, tx, {12, 6});
    CHECK(r.shift == 6);
    CHECK(r.errors == 0);
    CHECK(r.compared == rx.size());
    CHECK(ber(rx, tx).ratio > 0.3);
    CHECK_THROWS_AS((void)ber(std::vector<std::uint8_t>{}, tx), InputError);
}

TEST_CASE("sic_depth examples and identities") {
    const auto x = testsupport::random_vector(4000, 9);
    CHECK(sic_depth(buf(x), buf(x)).db == 0.0);
    ComplexVector tenth = x;
    for (auto& v : tenth) v /= std::sqrt(10.0);
    CHECK(sic_depth(buf(x), buf(tenth)).db == doctest::Approx(10.0).epsilon(1e-12));

    const Complex c(0.3, -0.4);
    ComplexVector cx = x;
    for (auto& v : cx) v *= c;
    CHECK(sic_depth(buf(x), buf(cx)).db == doctest::Approx(-20.0 * std::log10(std::abs(c))).epsilon(1e-12));

    ComplexVector r = x;
    for (auto& v : r) v /= std::sqrt(15.42);
    CHECK(std::abs(sic_depth(buf(x), buf(r)).db - 11.88) < 0.01);

    const auto z = sic_depth(buf(x), buf(ComplexVector(4000)));
    CHECK(z.capped);
    CHECK(z.db == kDbCap);
    CHECK_FALSE(sic_depth(buf(x), buf(x)).capped);
    CHECK_THROWS_AS((void)sic_depth(buf({}), buf(x)), InputError);
}

TEST_CASE("windowed sic_depth") {
    ComplexVector before(100, 1.0), after(100, 1.0);
    for (std::size_t i = 50; i < 100; ++i) after[i] = 0.1;
    CHECK(sic_depth(buf(before), buf(after), 50, 50).db == doctest::Approx(20.0));
    CHECK(sic_depth(buf(before), buf(after), 0, 50).db == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)sic_depth(buf(before), buf(after), 90, 20), InputError);
}

TEST_CASE("channel_suppression examples") {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(24, 14);
    CHECK(channel_suppression(grid_of(h), grid_of(h)).db == 0.0);
    CHECK(channel_suppression(grid_of(h), grid_of(h / 10.0)).db == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(std::abs(channel_suppression(grid_of(h), grid_of(h / 22.28)).db - 26.96) < 0.01);
    const auto z = channel_suppression(grid_of(h), grid_of(Eigen::MatrixXcd::Zero(24, 14)));
    CHECK(z.capped);
    CHECK(z.db == kDbCap);
    CHECK_THROWS_AS((void)channel_suppression(grid_of(h), grid_of(Eigen::MatrixXcd::Zero(24, 13))), InputError);
}

TEST_CASE("channel_suppression is invariant under a joint unitary transform") {
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(16, 10);
    const Eigen::MatrixXcd b = Eigen::MatrixXcd::Random(16, 10) * 0.2;
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Eigen::MatrixXcd::Random(16, 16));
    const Eigen::MatrixXcd u = qr.householderQ();
    const double before = channel_suppression(grid_of(a), grid_of(b)).db;
    const double after = channel_suppression(grid_of(u * a), grid_of(u * b)).db;
    CHECK(after == doctest::Approx(before).epsilon(1e-10));
}

TEST_CASE("matrix norms") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 2);
    m(0, 0) = 3.0;
    m(1, 1) = Complex(0.0, 4.0);
    CHECK(matrix_norm(m) == doctest::Approx(4.0));
    CHECK(matrix_norm(m, NormMode::Frobenius) == doctest::Approx(5.0));
}

}
