#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "siclab/common.hpp"
#include "siclab/constellation.hpp"

namespace siclab {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * @brief Subcarrier x symbol complex matrix with pilot/data masks.
 *
 * Rows are subcarriers (lowest frequency first), columns are OFDM symbols.
 * A cell is a pilot, a data cell, or unused; never both.
 */
struct ResourceGrid {
    Eigen::MatrixXcd values;
    BoolMatrix pilot_mask;
    BoolMatrix data_mask;

    ResourceGrid() = default;
    ResourceGrid(Eigen::Index subcarriers, Eigen::Index symbols);

    [[nodiscard]] Eigen::Index subcarriers() const noexcept { return values.rows(); }
    [[nodiscard]] Eigen::Index symbols() const noexcept { return values.cols(); }

    /// Throws InputError if masks overlap or disagree in shape with values.
    void validate() const;
};

/// Ground-truth bit sequence split into segments (one per slot or per packet).
struct BitStream {
    std::vector<std::uint8_t> bits;
    std::vector<std::size_t> framing;  // start offset of each segment, strictly increasing

    [[nodiscard]] std::size_t segment_count() const noexcept { return framing.size(); }
    [[nodiscard]] std::span<const std::uint8_t> segment(std::size_t i) const;
    void validate() const;
};

struct PacketMeta {
    std::size_t start_sample = 0;
    std::size_t length_samples = 0;
    std::size_t packet_index = 0;

    bool operator==(const PacketMeta&) const = default;
};

}  // namespace siclab

namespace siclab::waveform {

// ---------------------------------------------------------------------------
// NR-like downlink frame
// ---------------------------------------------------------------------------

/// Pilot lattice: pilots on the listed symbols of every slot, every `stride`-th subcarrier.
struct PilotPattern {
    std::vector<int> symbols{2, 11};
    int subcarrier_stride = 2;
    int subcarrier_offset = 0;
};

struct NrConfig {
    double scs_hz = 15e3;
    int n_prb = 66;
    int symbols_per_slot = 14;
    int slots = 20;  // two 10 ms frames at 15 kHz
    Modulation modulation = Modulation::Qam64;
    PilotPattern pilots;
    double native_rate = 15.36e6;
    std::vector<int> cp_lengths;  // per symbol of a slot; empty selects normal CP

    void validate() const;

    [[nodiscard]] int fft_size() const;
    [[nodiscard]] int subcarriers() const noexcept { return 12 * n_prb; }
    [[nodiscard]] int total_symbols() const noexcept { return slots * symbols_per_slot; }
    [[nodiscard]] std::vector<int> cp_pattern() const;
    [[nodiscard]] std::size_t slot_length() const;
    [[nodiscard]] std::size_t frame_length() const;
    /// First sample (start of CP) of a frame symbol.
    [[nodiscard]] std::size_t symbol_start(int symbol) const;
    [[nodiscard]] int cp_length(int symbol) const;
    /// FFT bin carrying grid row `subcarrier`; the grid is centred on DC.
    [[nodiscard]] int bin(int subcarrier) const;
    [[nodiscard]] bool is_pilot(int subcarrier, int symbol) const;
};

struct NrFrame {
    IqBuffer waveform;
    ResourceGrid grid;
    BitStream bits;
};

/// Generates the NR-like reference frame: QPSK pilots on the lattice, payload on every other cell.
[[nodiscard]] NrFrame generate_nr_frame(const NrConfig& cfg, std::uint64_t seed);

/// OFDM-modulates a [subcarriers x total_symbols] grid (CP insertion included).
[[nodiscard]] IqBuffer nr_modulate(const NrConfig& cfg, const Eigen::MatrixXcd& grid);

/// FFT of one symbol body (fft_size samples) scaled so an unimpaired waveform returns its grid column.
[[nodiscard]] Eigen::VectorXcd nr_demodulate_symbol(const NrConfig& cfg, std::span<const Complex> body);

// ---------------------------------------------------------------------------
// Wi-Fi-like packet burst
// ---------------------------------------------------------------------------

struct PreambleSpec {
    int short_repetitions = 10;
    int long_symbols = 2;
    int header_symbols = 1;
};

struct WifiConfig {
    double bandwidth_hz = 20e6;
    int mcs = 2;
    int payload_bytes = 1024;
    int packets_per_burst = 4;
    double idle_gap_s = 20e-6;
    PreambleSpec preamble;
    int data_subcarriers = 48;  // 48..52; the remainder of the 52 used tones are pilots

    void validate() const;

    [[nodiscard]] double sample_rate() const noexcept { return bandwidth_hz; }
    [[nodiscard]] Modulation modulation() const;
    [[nodiscard]] int bits_per_ofdm_symbol() const;
    [[nodiscard]] int data_symbols() const;
    [[nodiscard]] std::size_t stf_length() const;
    [[nodiscard]] std::size_t ltf_length() const;
    [[nodiscard]] std::size_t packet_length() const;
    [[nodiscard]] std::size_t gap_samples() const;
    [[nodiscard]] std::size_t burst_length() const;
};

constexpr int kWifiFft = 64;
constexpr int kWifiCp = 16;
constexpr int kWifiLtfGuard = 32;
constexpr int kWifiStfPeriod = 16;

/// Used-tone layout of one Wi-Fi OFDM symbol (subcarrier numbers in [-26, 26]).
struct WifiLayout {
    std::vector<int> data;
    std::vector<int> pilots;
    std::vector<double> pilot_base;
};

[[nodiscard]] WifiLayout wifi_layout(const WifiConfig& cfg);
/// Pilot polarity (+1/-1) for OFDM symbol n after the long training field.
[[nodiscard]] double wifi_pilot_polarity(int n);
/// Long training sequence value at subcarrier k in [-26, 26].
[[nodiscard]] double wifi_ltf_value(int k);
[[nodiscard]] int wifi_bin(int subcarrier) noexcept;
/// One 64-sample long training symbol in the time domain.
[[nodiscard]] ComplexVector wifi_ltf_symbol();
/// The full short training field (short_repetitions periods).
[[nodiscard]] ComplexVector wifi_stf(const WifiConfig& cfg);
/// Scale between used-tone values and unnormalized 64-point DFT bins.
[[nodiscard]] double wifi_tone_scale() noexcept;

struct WifiHeader {
    int packet_index = 0;
    int payload_bytes = 0;
    int mcs = 0;

    bool operator==(const WifiHeader&) const = default;
};

/// Header field bits: 12-bit packet index, 16-bit length, 4-bit MCS, CRC-8, zero fill.
[[nodiscard]] std::vector<std::uint8_t> encode_wifi_header(const WifiHeader& h, std::size_t n_bits);
[[nodiscard]] std::optional<WifiHeader> decode_wifi_header(std::span<const std::uint8_t> bits);

struct WifiBurst {
    IqBuffer waveform;
    std::vector<PacketMeta> packets;
    BitStream bits;
};

[[nodiscard]] WifiBurst generate_wifi_burst(const WifiConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Rate conversion and level control
// ---------------------------------------------------------------------------

struct ResamplerOptions {
    int max_denominator = 10000;
    double stopband_db = 80.0;
    /// Transition band width as a fraction of the lower of the two rates.
    double transition_fraction = 0.2;
};

struct Ratio {
    long long up = 1;
    long long down = 1;
};

/// Reduces target/source to lowest terms; ConfigError when no ratio within max_denominator fits.
[[nodiscard]] Ratio rational_ratio(double source_rate, double target_rate, int max_denominator);

/// Kaiser-windowed low-pass prototype at up * source_rate, odd length, DC gain = up.
[[nodiscard]] std::vector<double> resampler_prototype(const Ratio& r, const ResamplerOptions& opts = {});

/// Zero-phase rational polyphase resampling; output length ceil(N * up / down).
[[nodiscard]] IqBuffer resample(const IqBuffer& buf, double target_rate, const ResamplerOptions& opts = {});

/// Scales to unit RMS by a positive real constant.
[[nodiscard]] IqBuffer normalize(const IqBuffer& buf);

}  // namespace siclab::waveform
