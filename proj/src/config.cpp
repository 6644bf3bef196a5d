#include "siclab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace siclab::config {

namespace {

using harness::SweepConfig;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Unit-converted values, rounded to 15 digits so scaling noise does not show.
std::string scaled(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return num(std::strtod(buf, nullptr));
}

/// Gains are entered in dB; 12 digits keep repeated serialization stable.
std::string gain_db(Complex g) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", 20.0 * std::log10(std::abs(g)));
    return buf;
}

struct Value {
    std::string key;
    std::string text;
    int line = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config line " + std::to_string(line) + ": " + key + ": " + what);
    }

    [[nodiscard]] double as_double() const {
        double v = 0.0;
        const auto* end = text.data() + text.size();
        const auto res = std::from_chars(text.data(), end, v);
        if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) fail("expected a number, got '" + text + "'");
        return v;
    }

    [[nodiscard]] long long as_int() const {
        long long v = 0;
        const auto* end = text.data() + text.size();
        const auto res = std::from_chars(text.data(), end, v);
        if (res.ec != std::errc{} || res.ptr != end) fail("expected an integer, got '" + text + "'");
        return v;
    }

    [[nodiscard]] int as_int32() const {
        const long long v = as_int();
        if (v < -2147483647LL || v > 2147483647LL) fail("integer out of range");
        return static_cast<int>(v);
    }

    [[nodiscard]] std::size_t as_size() const {
        const long long v = as_int();
        if (v < 0) fail("must be non-negative");
        return static_cast<std::size_t>(v);
    }

    /// "auto"/"off" map to nullopt.
    [[nodiscard]] std::optional<double> as_optional(std::string_view none_word) const {
        if (text == none_word) return std::nullopt;
        return as_double();
    }

    [[nodiscard]] std::vector<std::string> as_list() const {
        if (text.size() < 2 || text.front() != '[' || text.back() != ']') fail("expected a list [a, b, ...]");
        std::vector<std::string> items;
        const std::string body = trim(std::string_view(text).substr(1, text.size() - 2));
        if (body.empty()) return items;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("empty list element");
            items.push_back(item);
        }
        return items;
    }

    [[nodiscard]] std::vector<double> as_double_list() const {
        std::vector<double> out;
        for (const auto& s : as_list()) out.push_back(Value{key, s, line}.as_double());
        return out;
    }
};

using Setter = std::function<void(SweepConfig&, const Value&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"version", [](SweepConfig&, const Value& v) {
             if (v.as_int() != kSchemaVersion) v.fail("unsupported schema version " + v.text);
         }},
        {"label", [](SweepConfig& c, const Value& v) { c.base.label = v.text; }},
        {"seed", [](SweepConfig& c, const Value& v) {
             std::uint64_t s = 0;
             const auto* end = v.text.data() + v.text.size();
             const auto res = std::from_chars(v.text.data(), end, s);
             if (res.ec != std::errc{} || res.ptr != end) v.fail("expected an unsigned integer");
             c.base.seed = s;
         }},
        {"capture.duration_ms", [](SweepConfig& c, const Value& v) { c.base.capture_duration_s = v.as_double() / 1e3; }},

        {"nr.scs_khz", [](SweepConfig& c, const Value& v) { c.base.nr.scs_hz = v.as_double() * 1e3; }},
        {"nr.n_prb", [](SweepConfig& c, const Value& v) { c.base.nr.n_prb = v.as_int32(); }},
        {"nr.symbols_per_slot", [](SweepConfig& c, const Value& v) { c.base.nr.symbols_per_slot = v.as_int32(); }},
        {"nr.slots", [](SweepConfig& c, const Value& v) { c.base.nr.slots = v.as_int32(); }},
        {"nr.modulation", [](SweepConfig& c, const Value& v) {
             try {
                 c.base.nr.modulation = parse_modulation(v.text);
             } catch (const Error& e) {
                 v.fail(e.what());
             }
         }},
        {"nr.native_rate_msps", [](SweepConfig& c, const Value& v) { c.base.nr.native_rate = v.as_double() * 1e6; }},
        {"nr.pilot_symbols", [](SweepConfig& c, const Value& v) {
             c.base.nr.pilots.symbols.clear();
             for (const auto& s : v.as_list()) c.base.nr.pilots.symbols.push_back(Value{v.key, s, v.line}.as_int32());
         }},
        {"nr.pilot_stride", [](SweepConfig& c, const Value& v) { c.base.nr.pilots.subcarrier_stride = v.as_int32(); }},
        {"nr.delay_samples", [](SweepConfig& c, const Value& v) { c.base.nr_imp.delay_samples = v.as_size(); }},
        {"nr.noise_dbfs", [](SweepConfig& c, const Value& v) { c.base.nr_imp.noise_power_dbfs = v.as_optional("off"); }},
        {"nr.cfo_hz", [](SweepConfig& c, const Value& v) { c.base.nr_imp.cfo_hz = v.as_double(); }},

        {"wifi.bandwidth_mhz", [](SweepConfig& c, const Value& v) { c.base.wifi.bandwidth_hz = v.as_double() * 1e6; }},
        {"wifi.mcs", [](SweepConfig& c, const Value& v) { c.base.wifi.mcs = v.as_int32(); }},
        {"wifi.payload_bytes", [](SweepConfig& c, const Value& v) { c.base.wifi.payload_bytes = v.as_int32(); }},
        {"wifi.packets_per_burst", [](SweepConfig& c, const Value& v) { c.base.wifi.packets_per_burst = v.as_int32(); }},
        {"wifi.idle_gap_us", [](SweepConfig& c, const Value& v) { c.base.wifi.idle_gap_s = v.as_double() / 1e6; }},
        {"wifi.gain_db", [](SweepConfig& c, const Value& v) {
             c.base.wifi_imp.gain = Complex(std::pow(10.0, v.as_double() / 20.0), 0.0);
         }},
        {"wifi.delay_samples", [](SweepConfig& c, const Value& v) { c.base.wifi_imp.delay_samples = v.as_size(); }},
        {"wifi.cfo_hz", [](SweepConfig& c, const Value& v) { c.base.wifi_imp.cfo_hz = v.as_double(); }},
        {"wifi.noise_dbfs", [](SweepConfig& c, const Value& v) { c.base.wifi_imp.noise_power_dbfs = v.as_optional("off"); }},
        {"wifi.header_evm_threshold_pct", [](SweepConfig& c, const Value& v) { c.base.wifi_rx.header_evm_threshold_pct = v.as_double(); }},

        {"sic.filter_length", [](SweepConfig& c, const Value& v) { c.base.sic.filter_length = v.as_int32(); }},
        {"sic.training_fraction", [](SweepConfig& c, const Value& v) { c.base.sic.training_fraction = v.as_double(); }},
        {"sic.lambda", [](SweepConfig& c, const Value& v) { c.base.sic.lambda = v.as_optional("auto"); }},
        {"sic.epsilon", [](SweepConfig& c, const Value& v) { c.base.sic.epsilon = v.as_optional("auto"); }},
        {"sic.max_delay_search", [](SweepConfig& c, const Value& v) { c.base.sic.max_delay_search = v.as_size(); }},
        {"sic.precursor_taps", [](SweepConfig& c, const Value& v) { c.base.sic.precursor_taps = v.as_int32(); }},
        {"sic.delay_window", [](SweepConfig& c, const Value& v) { c.base.sic.delay_window = v.as_size(); }},

        {"channel.delay_spread_ns", [](SweepConfig& c, const Value& v) { c.delay_spread_s = v.as_double() / 1e9; }},
        {"sweep.attenuations_db", [](SweepConfig& c, const Value& v) { c.attenuations_db = v.as_double_list(); }},
        {"sweep.channel_cases", [](SweepConfig& c, const Value& v) {
             c.channel_cases.clear();
             for (const auto& name : v.as_list()) c.channel_cases.push_back({name, {}, {}});
         }},
        {"sweep.seeds_per_point", [](SweepConfig& c, const Value& v) { c.seeds_per_point = v.as_int32(); }},
    };
    return table;
}

}  // namespace

void apply_config_text(harness::SweepConfig& cfg, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    bool cases_touched = false;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        Value v{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), line_no};
        if (v.key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": missing key");
        if (v.text.empty()) v.fail("missing value");
        const auto it = setters().find(v.key);
        if (it == setters().end()) throw ConfigError("unknown configuration key '" + v.key + "' (line " + std::to_string(line_no) + ")");
        it->second(cfg, v);
        cases_touched = cases_touched || v.key == "sweep.channel_cases" || v.key == "channel.delay_spread_ns";
    }
    if (cases_touched) {
        if (!(cfg.delay_spread_s > 0.0)) throw ConfigError("channel.delay_spread_ns must be positive");
        for (auto& c : cfg.channel_cases) {
            try {
                c = harness::channel_case(c.name, cfg.delay_spread_s);
            } catch (const Error& e) {
                throw ConfigError("sweep.channel_cases: " + std::string(e.what()));
            }
        }
    }
    cfg.validate();
}

harness::SweepConfig parse_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    harness::SweepConfig cfg = harness::default_sweep();
    apply_config_text(cfg, ss.str());
    return cfg;
}

std::string serialize_config(const harness::SweepConfig& cfg) {
    const auto& b = cfg.base;
    auto list = [](const auto& items, auto fmt) {
        std::string s = "[";
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += ", ";
            s += fmt(items[i]);
        }
        return s + "]";
    };
    auto opt = [](const std::optional<double>& v, const char* none) { return v ? num(*v) : std::string(none); };

    std::ostringstream os;
    os << "version = " << kSchemaVersion << "\n"
       << "label = " << b.label << "\n"
       << "seed = " << b.seed << "\n"
       << "capture.duration_ms = " << scaled(b.capture_duration_s * 1e3) << "\n\n"
       << "nr.scs_khz = " << scaled(b.nr.scs_hz / 1e3) << "\n"
       << "nr.n_prb = " << b.nr.n_prb << "\n"
       << "nr.symbols_per_slot = " << b.nr.symbols_per_slot << "\n"
       << "nr.slots = " << b.nr.slots << "\n"
       << "nr.modulation = " << modulation_name(b.nr.modulation) << "\n"
       << "nr.native_rate_msps = " << scaled(b.nr.native_rate / 1e6) << "\n"
       << "nr.pilot_symbols = " << list(b.nr.pilots.symbols, [](int v) { return std::to_string(v); }) << "\n"
       << "nr.pilot_stride = " << b.nr.pilots.subcarrier_stride << "\n"
       << "nr.delay_samples = " << b.nr_imp.delay_samples << "\n"
       << "nr.noise_dbfs = " << opt(b.nr_imp.noise_power_dbfs, "off") << "\n"
       << "nr.cfo_hz = " << num(b.nr_imp.cfo_hz) << "\n\n"
       << "wifi.bandwidth_mhz = " << scaled(b.wifi.bandwidth_hz / 1e6) << "\n"
       << "wifi.mcs = " << b.wifi.mcs << "\n"
       << "wifi.payload_bytes = " << b.wifi.payload_bytes << "\n"
       << "wifi.packets_per_burst = " << b.wifi.packets_per_burst << "\n"
       << "wifi.idle_gap_us = " << scaled(b.wifi.idle_gap_s * 1e6) << "\n"
       << "wifi.gain_db = " << gain_db(b.wifi_imp.gain) << "\n"
       << "wifi.delay_samples = " << b.wifi_imp.delay_samples << "\n"
       << "wifi.cfo_hz = " << num(b.wifi_imp.cfo_hz) << "\n"
       << "wifi.noise_dbfs = " << opt(b.wifi_imp.noise_power_dbfs, "off") << "\n"
       << "wifi.header_evm_threshold_pct = " << num(b.wifi_rx.header_evm_threshold_pct) << "\n\n"
       << "sic.filter_length = " << b.sic.filter_length << "\n"
       << "sic.training_fraction = " << num(b.sic.training_fraction) << "\n"
       << "sic.lambda = " << opt(b.sic.lambda, "auto") << "\n"
       << "sic.epsilon = " << opt(b.sic.epsilon, "auto") << "\n"
       << "sic.max_delay_search = " << b.sic.max_delay_search << "\n"
       << "sic.precursor_taps = " << b.sic.precursor_taps << "\n"
       << "sic.delay_window = " << b.sic.delay_window << "\n\n"
       << "channel.delay_spread_ns = " << scaled(cfg.delay_spread_s * 1e9) << "\n"
       << "sweep.attenuations_db = " << list(cfg.attenuations_db, num) << "\n"
       << "sweep.channel_cases = " << list(cfg.channel_cases, [](const harness::ChannelCase& c) { return c.name; }) << "\n"
       << "sweep.seeds_per_point = " << cfg.seeds_per_point << "\n";
    return os.str();
}

}  // namespace siclab::config
