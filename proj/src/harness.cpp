#include "siclab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "siclab/metrics.hpp"

namespace siclab::harness {

namespace {

IqBuffer truncate(const IqBuffer& buf, std::size_t n) {
    ComplexVector v(buf.vector().begin(), buf.vector().begin() + static_cast<std::ptrdiff_t>(std::min(n, buf.size())));
    v.resize(n);
    return IqBuffer(std::move(v), buf.sample_rate());
}

/// Back-to-back copies of `unit` (each followed by `gap` zeros) filling n samples.
IqBuffer tile(const IqBuffer& unit, std::size_t gap, std::size_t n) {
    ComplexVector v(n);
    const std::size_t period = unit.size() + gap;
    for (std::size_t start = 0; start < n; start += period) {
        const std::size_t len = std::min(unit.size(), n - start);
        std::copy_n(unit.vector().begin(), len, v.begin() + static_cast<std::ptrdiff_t>(start));
    }
    return IqBuffer(std::move(v), unit.sample_rate());
}

std::string format_attenuation(double db) {
    std::ostringstream os;
    os << db;
    return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
    nr.validate();
    wifi.validate();
    nr_channel.validate();
    wifi_channel.validate();
    nr_imp.validate();
    wifi_imp.validate();
    sic.validate();
    if (!(capture_duration_s > 0.0)) throw ConfigError("capture duration must be positive");
    if (capture_samples() < wifi.packet_length()) throw ConfigError("capture shorter than one Wi-Fi packet");
    if (capture_samples() < static_cast<std::size_t>(sic.filter_length) * 4) throw ConfigError("capture too short for the SIC fit");
    if (label.empty()) throw ConfigError("experiment label must not be empty");
}

std::size_t ExperimentConfig::capture_samples() const {
    return static_cast<std::size_t>(std::llround(capture_duration_s * wifi.sample_rate()));
}

std::vector<ChannelCase> default_channel_cases(double delay_spread_s) {
    return {channel_case("NoFading", delay_spread_s), channel_case("TDL-B/TGn-B", delay_spread_s),
            channel_case("TDL-C/TGn-B", delay_spread_s), channel_case("TDL-C/TGn-D", delay_spread_s)};
}

ChannelCase channel_case(const std::string& name, double delay_spread_s) {
    ChannelCase c;
    c.name = name;
    std::string nr_name = name;
    std::string wifi_name = name;
    if (const auto slash = name.find('/'); slash != std::string::npos) {
        nr_name = name.substr(0, slash);
        wifi_name = name.substr(slash + 1);
    }
    c.nr = channel::builtin_profile(nr_name, delay_spread_s);
    c.wifi = channel::builtin_profile(wifi_name, delay_spread_s);
    for (auto* p : {&c.nr, &c.wifi}) {
        if (!p->is_identity()) {
            p->fading = channel::Fading::StaticDraw;
            p->unit_energy = true;
        }
    }
    return c;
}

void SweepConfig::validate() const {
    base.validate();
    if (attenuations_db.empty()) throw ConfigError("sweep: attenuations_db must not be empty");
    for (std::size_t i = 0; i < attenuations_db.size(); ++i) {
        if (!std::isfinite(attenuations_db[i]) || attenuations_db[i] < 0.0) {
            throw ConfigError("sweep: attenuations must be finite and non-negative");
        }
        if (i > 0 && !(attenuations_db[i] > attenuations_db[i - 1])) throw ConfigError("sweep: attenuations must be ascending");
    }
    if (channel_cases.empty()) throw ConfigError("sweep: channel_cases must not be empty");
    for (std::size_t i = 0; i < channel_cases.size(); ++i) {
        channel_cases[i].nr.validate();
        channel_cases[i].wifi.validate();
        for (std::size_t j = 0; j < i; ++j) {
            if (channel_cases[j].name == channel_cases[i].name) throw ConfigError("sweep: duplicate channel case " + channel_cases[i].name);
        }
    }
    if (seeds_per_point < 1) throw ConfigError("sweep: seeds_per_point must be >= 1");
}

std::size_t SweepConfig::point_count() const {
    return attenuations_db.size() * channel_cases.size() * static_cast<std::size_t>(seeds_per_point);
}

std::uint64_t point_seed(std::uint64_t base, std::size_t case_index, std::size_t attenuation_index, std::size_t replicate) {
    std::uint64_t h = mix_seed(case_index);
    h = mix_seed(h ^ attenuation_index);
    h = mix_seed(h ^ replicate);
    return base ^ h;
}

ExperimentConfig point_config(const SweepConfig& cfg, std::size_t case_index, std::size_t attenuation_index,
                              std::size_t replicate) {
    ExperimentConfig e = cfg.base;
    const ChannelCase& c = cfg.channel_cases.at(case_index);
    const double att = cfg.attenuations_db.at(attenuation_index);
    e.nr_channel = c.nr;
    e.wifi_channel = c.wifi;
    e.channel_case = c.name;
    e.wifi_imp.attenuation_db = att;
    e.seed = point_seed(cfg.base.seed, case_index, attenuation_index, replicate);
    e.label = cfg.base.label + "/" + c.name + "/" + format_attenuation(att) + "dB/r" + std::to_string(replicate);
    return e;
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg, ExperimentArtifacts* artifacts) {
    ExperimentRecord rec;
    rec.label = cfg.label;
    rec.channel_case = cfg.channel_case;
    rec.attenuation_db = cfg.wifi_imp.attenuation_db;
    rec.seed = cfg.seed;
    try {
        cfg.validate();
        const double fs = cfg.wifi.sample_rate();
        const std::size_t n = cfg.capture_samples();

        // Dominant NR path: the repeated reference through its channel.
        const auto nr_frame = waveform::generate_nr_frame(cfg.nr, derive_seed(cfg.seed, 101));
        const IqBuffer nr_unit = waveform::normalize(waveform::resample(waveform::normalize(nr_frame.waveform), fs));
        const IqBuffer reference = tile(nr_unit, 0, n);
        IqBuffer nr_path = channel::apply_tdl(reference, cfg.nr_channel, derive_seed(cfg.seed, 102));
        nr_path = truncate(channel::apply_impairments(nr_path, cfg.nr_imp, derive_seed(cfg.seed, 103)), n);

        // Weaker Wi-Fi path: repeated bursts separated by the idle gap.
        const auto burst = waveform::generate_wifi_burst(cfg.wifi, derive_seed(cfg.seed, 104));
        const IqBuffer wifi_unit = waveform::normalize(burst.waveform);
        IqBuffer wifi_path = tile(wifi_unit, cfg.wifi.gap_samples(), n);
        wifi_path = channel::apply_tdl(wifi_path, cfg.wifi_channel, derive_seed(cfg.seed, 105));
        wifi_path = truncate(channel::apply_impairments(wifi_path, cfg.wifi_imp, derive_seed(cfg.seed, 106)), n);

        const double p_nr = nr_path.mean_power();
        const double p_wifi = wifi_path.mean_power();
        if (p_nr > 0.0 && p_wifi > 0.0) rec.nr_to_wifi_db = 10.0 * std::log10(p_nr / p_wifi);

        const IqBuffer composite = channel::remove_dc(channel::mix_composite(nr_path, wifi_path));
        if (artifacts) artifacts->composite = composite;

        // NR on the composite at the native rate.
        const auto nr_before = rx::demod_nr(waveform::resample(composite, cfg.nr.native_rate), cfg.nr, nr_frame.grid, nr_frame.bits);
        rec.nr_evm_pct = nr_before.evm_percent;
        rec.nr_ber = nr_before.ber;
        if (nr_before.signal_found) rec.nr_timing_offset = nr_before.timing_offset;

        // Cancellation.
        auto sic_res = sic::run_sic(composite, reference, cfg.sic);
        // The composite lost its mean; strip the reconstruction's mean to match.
        sic_res.residual = channel::remove_dc(sic_res.residual);
        sic_res.depth = metrics::sic_depth(composite, sic_res.residual);
        rec.sic_depth_db = sic_res.depth.db;
        rec.sic_delay = sic_res.delay.delay_samples;
        rec.sic_low_confidence = sic_res.low_confidence;
        if (artifacts) artifacts->residual = sic_res.residual;

        if (nr_before.signal_found) {
            rx::NrRxOptions forced;
            forced.forced_timing = nr_before.timing_offset;
            const auto nr_after = rx::demod_nr(waveform::resample(sic_res.residual, cfg.nr.native_rate), cfg.nr,
                                               nr_frame.grid, nr_frame.bits, forced);
            rec.chan_supp_db = metrics::channel_suppression(nr_before.channel_grid, nr_after.channel_grid).db;
        }

        // Wi-Fi on the residual and on the composite.
        const auto wifi_res = rx::demod_wifi(sic_res.residual, cfg.wifi, burst.bits, cfg.wifi_rx);
        rec.wifi_evm_pct = wifi_res.mean_data_evm_percent;
        rec.wifi_ber = wifi_res.mean_ber;
        rec.wifi_residual_decode = wifi_res.decode_success;
        rec.wifi_packets_residual = wifi_res.packets_detected;
        if (!wifi_res.packets.empty()) {
            double coarse = 0.0;
            double fine = 0.0;
            for (const auto& pk : wifi_res.packets) {
                coarse += pk.coarse_cfo_hz;
                fine += pk.fine_cfo_hz;
            }
            rec.wifi_coarse_cfo_hz = coarse / static_cast<double>(wifi_res.packets.size());
            rec.wifi_fine_cfo_hz = fine / static_cast<double>(wifi_res.packets.size());
            rec.wifi_timing_offset = wifi_res.packets.front().timing_offset;
        }
        const auto wifi_comp = rx::demod_wifi(composite, cfg.wifi, burst.bits, cfg.wifi_rx);
        rec.wifi_composite_decode = wifi_comp.decode_success;
        rec.wifi_packets_composite = wifi_comp.packets_detected;
    } catch (const std::exception& e) {
        rec.failure = e.what();
        if (rec.failure.empty()) rec.failure = "unknown error";
    }
    return rec;
}

std::vector<ExperimentRecord> sweep(const SweepConfig& cfg, int parallel, const ArtifactSink& sink) {
    cfg.validate();
    struct Point {
        std::size_t c, a, r;
    };
    std::vector<Point> points;
    for (std::size_t c = 0; c < cfg.channel_cases.size(); ++c) {
        for (std::size_t a = 0; a < cfg.attenuations_db.size(); ++a) {
            for (std::size_t r = 0; r < static_cast<std::size_t>(cfg.seeds_per_point); ++r) points.push_back({c, a, r});
        }
    }
    std::vector<ExperimentRecord> out(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            const ExperimentConfig pc = point_config(cfg, points[i].c, points[i].a, points[i].r);
            if (sink) {
                ExperimentArtifacts art;
                out[i] = run_experiment(pc, &art);
                sink(i, out[i], art);
            } else {
                out[i] = run_experiment(pc);
            }
        }
    };
    const auto workers = static_cast<std::size_t>(std::clamp(parallel, 1, 256));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(workers, points.size()); ++t) pool.emplace_back(worker);
    }
    return out;
}

SweepConfig default_sweep() {
    SweepConfig cfg;
    auto& b = cfg.base;
    b.label = "siclab";
    b.capture_duration_s = 45e-3;
    b.nr_imp.delay_samples = 120;
    b.nr_imp.noise_power_dbfs = -33.0;
    b.wifi_imp.delay_samples = 2000;
    b.wifi_imp.gain = Complex(std::pow(10.0, -2.0 / 20.0), 0.0);
    b.wifi_imp.cfo_hz = 2000.0;
    return cfg;
}

void apply_preset(SweepConfig& cfg, const std::string& name) {
    if (name == "table2") {
        cfg.attenuations_db = {18.0};
        cfg.channel_cases = default_channel_cases(cfg.delay_spread_s);
        cfg.seeds_per_point = 20;
        cfg.base.nr_imp.noise_power_dbfs = -33.0;
    } else if (name == "ci") {
        cfg.base.capture_duration_s = 5e-3;
        cfg.base.nr.slots = 5;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected table2 or ci)");
    }
}

}  // namespace siclab::harness
