// siclab: attenuation sweeps of the NR/Wi-Fi interference-cancellation chain.

#include <CLI11.hpp>
#include <charconv>
#include <cstring>
#include <fstream>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>

#include "siclab/config.hpp"
#include "siclab/harness.hpp"
#include "siclab/iq_file.hpp"
#include "siclab/report.hpp"

namespace fs = std::filesystem;
using namespace siclab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct Options {
    std::string config_path;
    std::vector<std::string> presets;
    std::string out_dir = ".";
    std::string format = "csv";
    int seeds = 0;
    int parallel = 1;
    std::string dump_dir;
};

harness::SweepConfig resolve(const Options& o) {
    harness::SweepConfig cfg = harness::default_sweep();
    for (const auto& p : o.presets) harness::apply_preset(cfg, p);
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) throw ConfigError("cannot open config file " + o.config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        config::apply_config_text(cfg, ss.str());
    }
    if (o.seeds > 0) cfg.seeds_per_point = o.seeds;
    if (const char* env = std::getenv("SICLAB_SEED"); env && *env) {
        std::uint64_t s = 0;
        const char* end = env + std::strlen(env);
        const auto res = std::from_chars(env, end, s);
        if (res.ec != std::errc{} || res.ptr != end) throw ConfigError(std::string("SICLAB_SEED is not an unsigned integer: ") + env);
        cfg.base.seed = s;
    }
    cfg.validate();
    return cfg;
}

int run(const Options& o) {
    harness::SweepConfig cfg;
    report::Format format{};
    try {
        cfg = resolve(o);
        format = report::parse_format(o.format);
        if (o.parallel < 1) throw ConfigError("--parallel must be >= 1");
    } catch (const Error& e) {
        std::cerr << "siclab: configuration error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::mutex dump_mutex;
    std::vector<std::string> dump_errors;
    harness::ArtifactSink sink;
    if (!o.dump_dir.empty()) {
        fs::create_directories(o.dump_dir);
        sink = [&](std::size_t i, const harness::ExperimentRecord& rec, const harness::ExperimentArtifacts& art) {
            try {
                const std::string stem = "point" + std::to_string(i);
                if (!art.composite.empty()) {
                    iq_file::write(fs::path(o.dump_dir) / (stem + "_composite.cf32"), art.composite, rec.label + " composite");
                }
                if (!art.residual.empty()) {
                    iq_file::write(fs::path(o.dump_dir) / (stem + "_residual.cf32"), art.residual, rec.label + " residual");
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(dump_mutex);
                dump_errors.emplace_back(e.what());
            }
        };
    }

    std::cerr << "siclab: " << cfg.point_count() << " points, " << o.parallel << " worker(s)\n";
    const auto records = harness::sweep(cfg, o.parallel, sink);

    fs::create_directories(o.out_dir);
    const fs::path out = fs::path(o.out_dir) / (format == report::Format::Csv ? "report.csv" : "report.jsonl");
    try {
        report::emit_report(records, format, out);
    } catch (const Error& e) {
        std::cerr << "siclab: " << e.what() << "\n";
        return kExitPartial;
    }

    std::size_t failed = 0;
    for (const auto& r : records) {
        if (!r.ok()) {
            ++failed;
            std::cerr << "siclab: point " << r.label << " failed: " << r.failure << "\n";
        }
    }
    for (const auto& e : dump_errors) std::cerr << "siclab: dump failed: " << e << "\n";
    std::cerr << "siclab: wrote " << out.string() << " (" << records.size() << " records, " << failed << " failed)\n";
    return failed == 0 && dump_errors.empty() ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"siclab - NR/Wi-Fi successive interference cancellation sweeps"};
    app.require_subcommand(1);

    Options o;
    auto* run_cmd = app.add_subcommand("run", "Run an attenuation sweep and write a report");
    run_cmd->add_option("--config", o.config_path, "Configuration file (key = value)");
    run_cmd->add_option("--preset", o.presets, "Preset applied before the config file: table2, ci (repeatable)")
        ->check(CLI::IsMember({"table2", "ci"}));
    run_cmd->add_option("--out", o.out_dir, "Output directory");
    run_cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "jsonl"}));
    run_cmd->add_option("--seeds", o.seeds, "Seeds per sweep point (overrides the configuration)")->check(CLI::PositiveNumber);
    run_cmd->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--dump-iq", o.dump_dir, "Write composite/residual cf32 captures to this directory");

    auto* cfg_cmd = app.add_subcommand("config", "Print the resolved configuration");
    cfg_cmd->add_option("--config", o.config_path, "Configuration file");
    cfg_cmd->add_option("--preset", o.presets, "Preset (repeatable)")->check(CLI::IsMember({"table2", "ci"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*cfg_cmd) {
        try {
            std::cout << config::serialize_config(resolve(o));
            return kExitOk;
        } catch (const Error& e) {
            std::cerr << "siclab: configuration error: " << e.what() << "\n";
            return kExitConfig;
        }
    }
    try {
        return run(o);
    } catch (const std::exception& e) {
        std::cerr << "siclab: " << e.what() << "\n";
        return kExitPartial;
    }
}
