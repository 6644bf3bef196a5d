#include "siclab/iq_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace siclab::iq_file {
namespace {

std::uint32_t to_little_endian(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xFFU) << 24) | ((v & 0xFF00U) << 8) | ((v >> 8) & 0xFF00U) | (v >> 24);
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return std::filesystem::path(path.string() + ".meta");
}

void write(const std::filesystem::path& path, const IqBuffer& buf, const std::string& description) {
    if (description.find('\n') != std::string::npos) throw InputError("iq_file: description must be one line");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("iq_file: cannot open " + path.string() + " for writing");
    std::vector<std::uint32_t> words(2 * buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        const float re = static_cast<float>(buf[i].real());
        const float im = static_cast<float>(buf[i].imag());
        words[2 * i] = to_little_endian(std::bit_cast<std::uint32_t>(re));
        words[2 * i + 1] = to_little_endian(std::bit_cast<std::uint32_t>(im));
    }
    out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 4));
    if (!out) throw IoError("iq_file: write failed for " + path.string());

    std::ofstream meta(sidecar_path(path), std::ios::trunc);
    if (!meta) throw IoError("iq_file: cannot write sidecar for " + path.string());
    std::ostringstream rate;
    rate.precision(17);
    rate << buf.sample_rate();
    meta << "format=cf32le\n"
         << "sample_rate=" << rate.str() << "\n"
         << "samples=" << buf.size() << "\n"
         << "description=" << description << "\n";
    if (!meta) throw IoError("iq_file: sidecar write failed for " + path.string());
}

IqMetadata read_metadata(const std::filesystem::path& path) {
    std::ifstream meta(sidecar_path(path));
    if (!meta) throw IoError("iq_file: missing sidecar " + sidecar_path(path).string());
    IqMetadata md;
    std::string line;
    while (std::getline(meta, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("iq_file: malformed sidecar line '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "sample_rate") {
            md.sample_rate = std::stod(value);
        } else if (key == "description") {
            md.description = value;
        } else if (key == "format" && value != "cf32le") {
            throw IoError("iq_file: unsupported format '" + value + "'");
        }
    }
    if (!(md.sample_rate > 0.0)) throw IoError("iq_file: sidecar lacks a positive sample_rate");
    return md;
}

IqBuffer read(const std::filesystem::path& path) {
    const IqMetadata md = read_metadata(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("iq_file: cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() % 8 != 0) throw IoError("iq_file: truncated sample pair in " + path.string());
    ComplexVector samples(raw.size() / 8);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::uint32_t w[2];
        std::memcpy(w, raw.data() + 8 * i, 8);
        samples[i] = {std::bit_cast<float>(to_little_endian(w[0])), std::bit_cast<float>(to_little_endian(w[1]))};
    }
    return IqBuffer(std::move(samples), md.sample_rate);
}

}  // namespace siclab::iq_file
