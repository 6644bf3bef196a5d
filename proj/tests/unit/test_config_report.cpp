#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "siclab/config.hpp"
#include "siclab/report.hpp"

using namespace siclab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / "siclab_config_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_text(const char* name, const std::string& text) {
    const auto p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<harness::ExperimentRecord> sample_records(std::size_t n) {
    std::vector<harness::ExperimentRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        harness::ExperimentRecord r;
        r.label = "siclab/NoFading/18dB/r" + std::to_string(i);
        r.channel_case = i % 2 ? "TDL-C/TGn-B" : "NoFading";
        r.attenuation_db = 6.0 * static_cast<double>(i % 4 + 1);
        r.seed = 0x9e3779b97f4a7c15ULL + i;
        r.nr_evm_pct = 8.81234567 + 0.1 * static_cast<double>(i);
        r.nr_ber = 1.0 / 3.0;
        if (i % 3 != 0) r.wifi_evm_pct = 26.5 + static_cast<double>(i);
        if (i % 3 != 0) r.wifi_ber = 1e-4 * static_cast<double>(i);
        r.wifi_composite_decode = i % 5 == 0;
        r.wifi_residual_decode = i % 3 != 0;
        r.sic_depth_db = 11.88;
        r.chan_supp_db = 26.96;
        r.wifi_packets_residual = 4 * i;
        r.wifi_packets_composite = i % 2;
        r.wifi_coarse_cfo_hz = 2001.5;
        r.wifi_fine_cfo_hz = 1999.9999;
        r.wifi_timing_offset = 2000 + i;
        r.nr_timing_offset = 94;
        r.sic_delay = 120;
        r.sic_low_confidence = i == 2;
        r.nr_to_wifi_db = 20.0;
        if (i == 3) r.failure = "run_sic: training segment shorter than the FIR length";
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_SUITE("config_report") {

TEST_CASE("empty file yields the full default configuration") {
    const auto cfg = config::parse_config(write_text("empty.conf", ""));
    const auto& b = cfg.base;
    CHECK(b.nr.scs_hz == 15e3);
    CHECK(b.nr.n_prb == 66);
    CHECK(b.nr.modulation == Modulation::Qam64);
    CHECK(b.wifi.bandwidth_hz == 20e6);
    CHECK(b.wifi.mcs == 2);
    CHECK(b.wifi.payload_bytes == 1024);
    CHECK(b.wifi.packets_per_burst == 4);
    CHECK(b.wifi.idle_gap_s == doctest::Approx(20e-6));
    CHECK(b.sic.filter_length == 32);
    CHECK(b.sic.training_fraction == 0.30);
    CHECK(b.capture_samples() == 900000);
    CHECK(config::serialize_config(cfg) == config::serialize_config(harness::default_sweep()));
}

TEST_CASE("out-of-range values and unknown keys are rejected") {
    CHECK_THROWS_AS((void)config::parse_config(write_text("p0.conf", "wifi.payload_bytes = 0\n")), ConfigError);
    try {
        (void)config::parse_config(write_text("unk.conf", "# comment\nwifi.payload = 10\n"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("wifi.payload") != std::string::npos);
    }
    CHECK_THROWS_AS((void)config::parse_config(write_text("ver.conf", "version = 2\n")), ConfigError);
    CHECK_THROWS_AS((void)config::parse_config(write_text("num.conf", "seed = many\n")), ConfigError);
    CHECK_THROWS_AS((void)config::parse_config(write_text("case.conf", "sweep.channel_cases = [Rayleigh]\n")), ConfigError);
    CHECK_THROWS_AS((void)config::parse_config(scratch_dir() / "absent.conf"), IoError);
}

TEST_CASE("attenuation list and other settings round-trip through serialize and parse") {
    const auto cfg = config::parse_config(write_text(
        "rt.conf",
        "sweep.attenuations_db = [6,12,18,24]\n"
        "sweep.channel_cases = [NoFading, TDL-C/TGn-D]\n"
        "sic.lambda = 1e-7\nnr.noise_dbfs = off\nwifi.gain_db = -3.5\nseed = 99\nlabel = desk\n"));
    CHECK(cfg.attenuations_db == std::vector<double>{6.0, 12.0, 18.0, 24.0});
    REQUIRE(cfg.channel_cases.size() == 2);
    CHECK(cfg.channel_cases[1].name == "TDL-C/TGn-D");
    CHECK(cfg.base.sic.lambda == 1e-7);
    CHECK_FALSE(cfg.base.nr_imp.noise_power_dbfs);
    const auto text = config::serialize_config(cfg);
    const auto back = config::parse_config(write_text("rt2.conf", text));
    CHECK(back.attenuations_db == cfg.attenuations_db);
    CHECK(config::serialize_config(back) == text);
}

TEST_CASE("CSV layout") {
    const auto recs = sample_records(16);
    const auto csv = report::to_csv(recs);
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 17);
    CHECK(lines[0] == report::csv_header());
    CHECK(lines[0] == "label,channel_case,attenuation_db,seed,nr_evm_pct,nr_ber,wifi_evm_pct,wifi_ber,"
                      "wifi_composite_decode,sic_depth_db,chan_supp_db");
    CHECK(lines[1].find(",8.81235,0.333333,NA,NA,true,11.88,26.96") != std::string::npos);
    CHECK(lines[4].find(",NA,11.88,") != std::string::npos);  // failed point: decode flag unknown
}

TEST_CASE("emit_report: identical bytes, 17 lines, JSON-lines round trip, errors") {
    const auto recs = sample_records(16);
    const auto a = scratch_dir() / "a.csv";
    const auto b = scratch_dir() / "b.csv";
    report::emit_report(recs, report::Format::Csv, a);
    report::emit_report(recs, report::Format::Csv, b);
    CHECK(slurp(a) == slurp(b));

    const auto j = scratch_dir() / "r.jsonl";
    report::emit_report(recs, report::Format::JsonLines, j);
    const auto back = report::from_jsonl(slurp(j));
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(back[i] == recs[i]);

    CHECK_THROWS_AS(report::emit_report({}, report::Format::Csv, a), InputError);
    CHECK_THROWS_AS(report::emit_report(recs, report::Format::Csv, "/nonexistent-dir/r.csv"), IoError);
    CHECK(report::parse_format("jsonl") == report::Format::JsonLines);
    CHECK(report::parse_format("csv") == report::Format::Csv);
    CHECK_THROWS_AS((void)report::parse_format("xml"), ConfigError);
    CHECK_THROWS_AS((void)report::from_jsonl("{not json}\n"), InputError);
}

}
