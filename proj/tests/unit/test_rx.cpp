#include <doctest.h>

#include <cmath>

#include "siclab/channel.hpp"
#include "siclab/constellation.hpp"
#include "siclab/rx.hpp"
#include "siclab/sic.hpp"
#include "support.hpp"

using namespace siclab;
using namespace siclab::waveform;

namespace {

NrConfig nr_slots(int slots) {
    NrConfig c;
    c.slots = slots;
    return c;
}

/// Adds complex AWGN so the per-subcarrier SNR of the occupied band is snr_db.
IqBuffer add_inband_noise(const IqBuffer& x, int occupied, int fft, double snr_db, std::uint64_t seed) {
    const double sigma2 = x.mean_power() * fft / (occupied * std::pow(10.0, snr_db / 10.0));
    const auto w = channel::awgn(x.size(), sigma2, seed);
    ComplexVector out = x.vector();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[i];
    return IqBuffer(std::move(out), x.sample_rate());
}

/// Mean power over the packet samples only (gaps excluded).
double packet_power(const WifiBurst& b) {
    double e = 0.0;
    std::size_t n = 0;
    for (const auto& p : b.packets)
        for (std::size_t i = p.start_sample; i < p.start_sample + p.length_samples; ++i, ++n) e += std::norm(b.waveform[i]);
    return e / static_cast<double>(n);
}

IqBuffer impaired_burst(const WifiBurst& b, double cfo_hz, std::optional<double> snr_db, std::size_t lead,
                        std::uint64_t seed) {
    channel::ImpairmentSpec imp;
    imp.cfo_hz = cfo_hz;
    imp.delay_samples = lead;
    if (snr_db) imp.noise_power_dbfs = 10.0 * std::log10(packet_power(b)) - *snr_db;
    return channel::apply_impairments(b.waveform, imp, seed);
}

}  // namespace

TEST_SUITE("rx") {

TEST_CASE("NR loopback") {
    const auto cfg = nr_slots(2);
    const auto f = generate_nr_frame(cfg, 1);
    const auto r = rx::demod_nr(f.waveform, cfg, f.grid, f.bits);
    REQUIRE(r.signal_found);
    CHECK(r.timing_offset == 0);
    CHECK(r.symbols_demodulated == cfg.total_symbols());
    REQUIRE(r.evm_percent);
    CHECK(*r.evm_percent < 0.1);
    REQUIRE(r.ber);
    CHECK(*r.ber == 0.0);
    CHECK(r.decoded_bits.bits == f.bits.bits);
    CHECK(r.decoded_bits.framing == f.bits.framing);
}

TEST_CASE("NR timing recovers a leading delay") {
    const auto cfg = nr_slots(2);
    const auto f = generate_nr_frame(cfg, 2);
    channel::ImpairmentSpec imp;
    imp.delay_samples = 517;
    const auto cap = channel::apply_impairments(f.waveform, imp, 0);
    const auto r = rx::demod_nr(cap, cfg, f.grid, f.bits);
    CHECK(r.timing_offset == 517);
    REQUIRE(r.ber);
    CHECK(*r.ber == 0.0);
    CHECK(*r.evm_percent < 0.1);

    rx::NrRxOptions forced;
    forced.forced_timing = 517;
    const auto rf = rx::demod_nr(cap, cfg, f.grid, f.bits, forced);
    CHECK(rf.timing_offset == 517);
    CHECK(*rf.ber == 0.0);
}

TEST_CASE("NR flat gain is recovered at every pilot cell") {
    const auto cfg = nr_slots(1);
    const auto f = generate_nr_frame(cfg, 3);
    const Complex g(0.6, -0.35);
    channel::ImpairmentSpec imp;
    imp.gain = g;
    imp.delay_samples = 40;
    const auto cap = channel::apply_impairments(f.waveform, imp, 0);
    const auto r = rx::demod_nr(cap, cfg, f.grid, f.bits);
    REQUIRE(r.signal_found);
    CHECK(r.timing_offset == 40);
    const auto& h = r.channel_grid;
    REQUIRE(h.subcarriers() == f.grid.subcarriers());
    REQUIRE(h.symbols() == f.grid.symbols());
    CHECK(h.pilot_mask.cwiseEqual(f.grid.pilot_mask).all());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < h.subcarriers(); ++k)
        for (Eigen::Index l = 0; l < h.symbols(); ++l) {
            if (h.pilot_mask(k, l)) worst = std::max(worst, std::abs(h.values(k, l) - g));
            if (h.data_mask(k, l)) CHECK(std::abs(h.values(k, l) - g) < 1e-6);
        }
    CHECK(worst < 1e-6);
}

TEST_CASE("NR 64-QAM at 30 dB SNR gives about 3.16% EVM") {
    const auto cfg = nr_slots(10);
    const auto f = generate_nr_frame(cfg, 4);
    const auto cap = add_inband_noise(f.waveform, cfg.subcarriers(), cfg.fft_size(), 30.0, 77);
    const auto r = rx::demod_nr(cap, cfg, f.grid, f.bits);
    REQUIRE(r.evm_percent);
    CHECK(r.equalized.size() >= 100000);
    CHECK(*r.evm_percent == doctest::Approx(3.16).epsilon(0.3 / 3.16));
}

TEST_CASE("NR: BER is zero whenever every symbol error is inside half the minimum distance") {
    const auto cfg = nr_slots(2);
    const auto f = generate_nr_frame(cfg, 5);
    const auto cap = add_inband_noise(f.waveform, cfg.subcarriers(), cfg.fft_size(), 38.0, 78);
    const auto r = rx::demod_nr(cap, cfg, f.grid, f.bits);
    const Constellation c(cfg.modulation);
    double worst = 0.0;
    std::size_t i = 0;
    for (Eigen::Index l = 0; l < f.grid.symbols(); ++l)
        for (Eigen::Index k = 0; k < f.grid.subcarriers(); ++k)
            if (f.grid.data_mask(k, l)) worst = std::max(worst, std::abs(r.equalized[i++] - f.grid.values(k, l)));
    REQUIRE(i == r.equalized.size());
    if (worst < c.min_distance() / 2.0) CHECK(*r.ber == 0.0);
    CHECK(*r.ber <= 1.0);
    CHECK(*r.evm_percent >= 0.0);
}

TEST_CASE("NR: noise-only capture reports no signal and no fabricated KPIs") {
    const auto cfg = nr_slots(1);
    const auto f = generate_nr_frame(cfg, 6);
    const IqBuffer noise(testsupport::random_vector(f.waveform.size() + 2000, 9), cfg.native_rate);
    const auto r = rx::demod_nr(noise, cfg, f.grid, f.bits);
    CHECK_FALSE(r.signal_found);
    CHECK_FALSE(r.evm_percent);
    CHECK_FALSE(r.ber);
}

TEST_CASE("NR: wrong sample rate is an input error") {
    const auto cfg = nr_slots(1);
    const auto f = generate_nr_frame(cfg, 7);
    const IqBuffer wrong(f.waveform.vector(), 20e6);
    CHECK_THROWS_AS((void)rx::demod_nr(wrong, cfg, f.grid, f.bits), InputError);
}

TEST_CASE("Wi-Fi detection on a clean burst matches the generator metadata") {
    const WifiConfig cfg;
    const auto b = generate_wifi_burst(cfg, 10);
    const auto det = rx::detect_wifi_packets(b.waveform, cfg);
    REQUIRE(det.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        const long diff = static_cast<long>(det[i].offset) - static_cast<long>(b.packets[i].start_sample);
        CHECK(std::abs(diff) <= 1);
        CHECK(std::abs(det[i].coarse_cfo_hz) < 1.0);
    }
}

TEST_CASE("Wi-Fi detection: false-alarm rate on pure noise is below 1%") {
    const WifiConfig cfg;
    int captures_with_false_alarm = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const IqBuffer noise(channel::awgn(cfg.burst_length(), 1.0, 300 + t), cfg.sample_rate());
        if (!rx::detect_wifi_packets(noise, cfg).empty()) ++captures_with_false_alarm;
    }
    CHECK(captures_with_false_alarm <= 1);
}

TEST_CASE("Wi-Fi detection with a 5 kHz CFO") {
    const WifiConfig cfg;
    const auto b = generate_wifi_burst(cfg, 11);
    const auto cap = impaired_burst(b, 5000.0, 30.0, 300, 12);
    const auto det = rx::detect_wifi_packets(cap, cfg);
    REQUIRE(det.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(static_cast<long>(det[i].offset) - static_cast<long>(b.packets[i].start_sample + 300)) <= 1);
        CHECK(std::abs(det[i].coarse_cfo_hz - 5000.0) <= 200.0);
    }
}

TEST_CASE("Wi-Fi loopback demodulation") {
    const WifiConfig cfg;
    const auto b = generate_wifi_burst(cfg, 13);
    const auto r = rx::demod_wifi(b.waveform, cfg, b.bits);
    CHECK(r.packets_detected == 4);
    REQUIRE(r.packets.size() == 4);
    REQUIRE(r.mean_ber);
    CHECK(*r.mean_ber == 0.0);
    REQUIRE(r.mean_data_evm_percent);
    CHECK(*r.mean_data_evm_percent < 0.1);
    CHECK(r.decode_success);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(r.packets[i].header_crc_ok);
        CHECK(r.packets[i].matched_packet == i);
        CHECK(r.packets[i].timing_offset == b.packets[i].start_sample);
        CHECK(r.packets[i].bit_shift == 0);
    }
}

TEST_CASE("Wi-Fi CFO error vanishes at high SNR") {
    const WifiConfig cfg;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto b = generate_wifi_burst(cfg, 20 + s);
        const double cfo = 3000.0 - 1500.0 * static_cast<double>(s);
        const auto r = rx::demod_wifi(impaired_burst(b, cfo, 60.0, 150, 40 + s), cfg, b.bits);
        REQUIRE(r.packets.size() == 4);
        for (const auto& p : r.packets) {
            CHECK(std::abs(p.fine_cfo_hz - cfo) <= 10.0);
            CHECK(p.ber == 0.0);
        }
    }
}

TEST_CASE("Wi-Fi: nothing is invented on the residual of a perfectly cancelled NR-only capture") {
    const WifiConfig wcfg;
    const auto wifi = generate_wifi_burst(wcfg, 30);
    NrConfig ncfg;
    ncfg.slots = 2;
    const auto frame = generate_nr_frame(ncfg, 31);
    const auto ref = normalize(resample(normalize(frame.waveform), 20e6));

    const auto zero_residual = sic::cancel(ref, ref);
    const auto r0 = rx::demod_wifi(zero_residual, wcfg, wifi.bits);
    CHECK(r0.packets_detected == 0);
    CHECK_FALSE(r0.decode_success);
    CHECK_FALSE(r0.mean_ber);

    channel::ImpairmentSpec imp;
    imp.delay_samples = 64;
    const auto cap = channel::apply_impairments(ref, imp, 0);
    const auto res = sic::run_sic(cap, ref);
    CHECK(res.depth.db > 60.0);
    const auto r1 = rx::demod_wifi(res.residual, wcfg, wifi.bits);
    CHECK(r1.packets_detected == 0);
    CHECK_FALSE(r1.decode_success);
}

TEST_CASE("Wi-Fi report invariants under noise") {
    const WifiConfig cfg;
    const auto b = generate_wifi_burst(cfg, 50);
    const auto r = rx::demod_wifi(impaired_burst(b, 1000.0, 12.0, 100, 51), cfg, b.bits);
    CHECK(r.packets_detected >= r.packets.size());
    for (const auto& p : r.packets) {
        CHECK(p.header_evm_percent >= 0.0);
        CHECK(p.data_evm_percent >= 0.0);
        CHECK(p.ber >= 0.0);
        CHECK(p.ber <= 1.0);
    }
    if (r.packets_detected == 0) CHECK_FALSE(r.decode_success);
}

}
