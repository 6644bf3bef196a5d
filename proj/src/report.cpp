#include "siclab/report.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace siclab::report {

namespace {

using harness::ExperimentRecord;
using nlohmann::json;

std::string g6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string cell(const std::optional<double>& v) { return v ? g6(*v) : "NA"; }

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<T>();
}

}  // namespace

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::Csv;
    if (name == "jsonl" || name == "json-lines") return Format::JsonLines;
    throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv or jsonl)");
}

std::string_view csv_header() {
    return "label,channel_case,attenuation_db,seed,nr_evm_pct,nr_ber,wifi_evm_pct,wifi_ber,wifi_composite_decode,"
           "sic_depth_db,chan_supp_db";
}

std::string to_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream os;
    os << csv_header() << '\n';
    for (const auto& r : records) {
        os << r.label << ',' << r.channel_case << ',' << g6(r.attenuation_db) << ',' << r.seed << ','
           << cell(r.nr_evm_pct) << ',' << cell(r.nr_ber) << ',' << cell(r.wifi_evm_pct) << ',' << cell(r.wifi_ber)
           << ',' << (r.ok() ? (r.wifi_composite_decode ? "true" : "false") : "NA") << ',' << cell(r.sic_depth_db)
           << ',' << cell(r.chan_supp_db) << '\n';
    }
    return os.str();
}

std::string to_jsonl(const std::vector<ExperimentRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        json j;
        j["label"] = r.label;
        j["channel_case"] = r.channel_case;
        j["attenuation_db"] = r.attenuation_db;
        j["seed"] = r.seed;
        j["nr_evm_pct"] = opt(r.nr_evm_pct);
        j["nr_ber"] = opt(r.nr_ber);
        j["wifi_evm_pct"] = opt(r.wifi_evm_pct);
        j["wifi_ber"] = opt(r.wifi_ber);
        j["wifi_composite_decode"] = r.wifi_composite_decode;
        j["sic_depth_db"] = opt(r.sic_depth_db);
        j["chan_supp_db"] = opt(r.chan_supp_db);
        j["wifi_residual_decode"] = r.wifi_residual_decode;
        j["wifi_packets_residual"] = r.wifi_packets_residual;
        j["wifi_packets_composite"] = r.wifi_packets_composite;
        j["wifi_coarse_cfo_hz"] = opt(r.wifi_coarse_cfo_hz);
        j["wifi_fine_cfo_hz"] = opt(r.wifi_fine_cfo_hz);
        j["wifi_timing_offset"] = opt(r.wifi_timing_offset);
        j["nr_timing_offset"] = opt(r.nr_timing_offset);
        j["sic_delay"] = opt(r.sic_delay);
        j["sic_low_confidence"] = r.sic_low_confidence;
        j["nr_to_wifi_db"] = opt(r.nr_to_wifi_db);
        j["failure"] = r.failure;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<ExperimentRecord> from_jsonl(std::string_view text) {
    std::vector<ExperimentRecord> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            ExperimentRecord r;
            r.label = j.at("label").get<std::string>();
            r.channel_case = j.at("channel_case").get<std::string>();
            r.attenuation_db = j.at("attenuation_db").get<double>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.nr_evm_pct = get_opt<double>(j, "nr_evm_pct");
            r.nr_ber = get_opt<double>(j, "nr_ber");
            r.wifi_evm_pct = get_opt<double>(j, "wifi_evm_pct");
            r.wifi_ber = get_opt<double>(j, "wifi_ber");
            r.wifi_composite_decode = j.at("wifi_composite_decode").get<bool>();
            r.sic_depth_db = get_opt<double>(j, "sic_depth_db");
            r.chan_supp_db = get_opt<double>(j, "chan_supp_db");
            r.wifi_residual_decode = j.at("wifi_residual_decode").get<bool>();
            r.wifi_packets_residual = j.at("wifi_packets_residual").get<std::size_t>();
            r.wifi_packets_composite = j.at("wifi_packets_composite").get<std::size_t>();
            r.wifi_coarse_cfo_hz = get_opt<double>(j, "wifi_coarse_cfo_hz");
            r.wifi_fine_cfo_hz = get_opt<double>(j, "wifi_fine_cfo_hz");
            r.wifi_timing_offset = get_opt<std::size_t>(j, "wifi_timing_offset");
            r.nr_timing_offset = get_opt<std::size_t>(j, "nr_timing_offset");
            r.sic_delay = get_opt<std::size_t>(j, "sic_delay");
            r.sic_low_confidence = j.at("sic_low_confidence").get<bool>();
            r.nr_to_wifi_db = get_opt<double>(j, "nr_to_wifi_db");
            r.failure = j.at("failure").get<std::string>();
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw InputError("jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void emit_report(const std::vector<ExperimentRecord>& records, Format format, const std::filesystem::path& out_path) {
    if (records.empty()) throw InputError("emit_report: no records");
    const std::string body = format == Format::Csv ? to_csv(records) : to_jsonl(records);
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write report " + out_path.string());
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw IoError("failed writing report " + out_path.string());
}

}  // namespace siclab::report
