#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "siclab/channel.hpp"

namespace siclab::channel {
namespace {

struct Tap {
    double delay;
    double power_db;
};

// Normalized delays (multiples of the delay spread) and powers, sorted by delay.
const std::vector<Tap> kTdlB = {
    {0.0000, 0.0},   {0.1072, -2.2},  {0.2095, -3.2},  {0.2155, -4.0},  {0.2870, -9.8},  {0.2986, -1.2},
    {0.3681, -7.6},  {0.3697, -3.0},  {0.3752, -3.4},  {0.5055, -5.2},  {0.5283, -9.0},  {0.5700, -8.9},
    {1.1021, -4.8},  {1.2756, -5.7},  {1.5474, -7.5},  {1.7842, -1.9},  {2.0169, -7.6},  {2.8294, -12.2},
    {3.0219, -9.8},  {3.6187, -11.4}, {4.1067, -14.9}, {4.2790, -9.2},  {4.7834, -11.3},
};

const std::vector<Tap> kTdlC = {
    {0.0000, -4.4},  {0.2099, -1.2},  {0.2176, -2.5},  {0.2219, -3.5},  {0.2329, -5.2},  {0.6366, 0.0},
    {0.6448, -2.2},  {0.6560, -3.9},  {0.6584, -7.4},  {0.7935, -7.1},  {0.8213, -10.7}, {0.9336, -11.1},
    {1.2285, -5.1},  {1.3083, -6.8},  {2.1704, -8.7},  {2.7105, -13.2}, {4.2589, -13.9}, {4.6003, -13.9},
    {5.4902, -15.8}, {5.6077, -17.1}, {6.3065, -16.0}, {6.6374, -15.7}, {7.0427, -21.6}, {8.6523, -22.8},
};

// Cluster powers summed per tap; delays in nanoseconds.
const std::vector<Tap> kTgnB = {
    {0, 0.0}, {10, -5.4}, {20, -2.5}, {30, -5.9}, {40, -9.2}, {50, -12.5}, {60, -15.6}, {70, -18.7}, {80, -21.8},
};

const std::vector<Tap> kTgnD = {
    {0, 0.0},    {10, -0.9},   {20, -1.7},   {30, -2.6},   {40, -3.5},   {50, -4.3},
    {60, -5.2},  {70, -6.1},   {80, -6.9},   {90, -7.8},   {110, -4.7},  {140, -7.3},
    {170, -9.9}, {200, -12.5}, {240, -13.7}, {290, -18.0}, {340, -22.4}, {390, -26.7},
};

ChannelProfile from_table(std::string name, const std::vector<Tap>& table, double delay_scale_s, Fading fading) {
    std::vector<double> d, p;
    for (const auto& t : table) {
        d.push_back(t.delay * delay_scale_s);
        p.push_back(t.power_db);
    }
    return make_profile(std::move(name), std::move(d), std::move(p), fading);
}

}  // namespace

void ChannelProfile::validate() const {
    if (tap_delays_s.empty() || tap_delays_s.size() != tap_powers_db.size()) {
        throw ConfigError("channel profile '" + name + "': delays and powers must be non-empty and equal length");
    }
    for (std::size_t i = 0; i < tap_delays_s.size(); ++i) {
        if (!(tap_delays_s[i] >= 0.0) || !std::isfinite(tap_powers_db[i])) {
            throw ConfigError("channel profile '" + name + "': invalid tap");
        }
        if (i > 0 && tap_delays_s[i] < tap_delays_s[i - 1]) {
            throw ConfigError("channel profile '" + name + "': tap delays must be ascending");
        }
    }
    double total = 0.0;
    for (double p : tap_powers_db) total += std::pow(10.0, p / 10.0);
    if (std::abs(10.0 * std::log10(total)) > 0.01) {
        throw ConfigError("channel profile '" + name + "': total tap power must be 0 dB");
    }
}

bool ChannelProfile::is_identity() const noexcept {
    return tap_delays_s.size() == 1 && tap_delays_s[0] == 0.0 && fading == Fading::None &&
           std::abs(tap_powers_db[0]) <= 0.01;
}

ChannelProfile make_profile(std::string name, std::vector<double> delays_s, std::vector<double> powers_db,
                            Fading fading) {
    if (delays_s.size() != powers_db.size() || delays_s.empty()) {
        throw ConfigError("channel profile '" + name + "': delays and powers must be non-empty and equal length");
    }
    std::vector<std::size_t> order(delays_s.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return delays_s[a] < delays_s[b]; });
    double total = 0.0;
    for (double p : powers_db) total += std::pow(10.0, p / 10.0);
    const double offset_db = 10.0 * std::log10(total);
    ChannelProfile prof;
    prof.name = std::move(name);
    prof.fading = fading;
    prof.tap_delays_s.clear();
    prof.tap_powers_db.clear();
    for (auto i : order) {
        prof.tap_delays_s.push_back(delays_s[i]);
        prof.tap_powers_db.push_back(powers_db[i] - offset_db);
    }
    prof.validate();
    return prof;
}

ChannelProfile builtin_profile(std::string_view name, double delay_spread_s) {
    if (name == "NoFading") return ChannelProfile{};
    if (name == "TDL-B" || name == "TDL-C") {
        auto p = from_table(std::string(name), name == "TDL-B" ? kTdlB : kTdlC, delay_spread_s, Fading::StaticDraw);
        p.delay_spread_s = delay_spread_s;
        return p;
    }
    if (name == "TGn-B") return from_table("TGn-B", kTgnB, 1e-9, Fading::StaticDraw);
    if (name == "TGn-D") return from_table("TGn-D", kTgnD, 1e-9, Fading::StaticDraw);
    throw ConfigError("unknown channel profile '" + std::string(name) + "'");
}

std::vector<std::string> builtin_profile_names() { return {"NoFading", "TDL-B", "TDL-C", "TGn-B", "TGn-D"}; }

ChannelProfile parse_profile(std::string_view text, std::string name, std::optional<double> delay_spread_s,
                             Fading fading) {
    std::vector<double> d, p;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double delay = 0.0, power = 0.0;
        if (!(fields >> delay)) continue;
        std::string extra;
        if (!(fields >> power) || (fields >> extra)) {
            throw ConfigError("profile '" + name + "' line " + std::to_string(line_no) + ": expected 'delay power_db'");
        }
        d.push_back(delay_spread_s ? delay * *delay_spread_s : delay * 1e-9);
        p.push_back(power);
    }
    auto prof = make_profile(std::move(name), std::move(d), std::move(p), fading);
    if (delay_spread_s) prof.delay_spread_s = *delay_spread_s;
    return prof;
}

ChannelProfile load_profile(const std::filesystem::path& path, std::string name, std::optional<double> delay_spread_s,
                            Fading fading) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open channel profile " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_profile(ss.str(), std::move(name), delay_spread_s, fading);
}

}  // namespace siclab::channel
