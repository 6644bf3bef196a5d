#pragma once

#include <filesystem>
#include <string>

#include "siclab/common.hpp"

namespace siclab::iq_file {

/// Raw samples are interleaved little-endian float32 (I, Q) pairs with no header.
/// The sidecar `<path>.meta` holds key=value lines: sample_rate, description, format, samples.
struct IqMetadata {
    double sample_rate = 0.0;
    std::string description;
};

void write(const std::filesystem::path& path, const IqBuffer& buf, const std::string& description = {});

[[nodiscard]] IqBuffer read(const std::filesystem::path& path);

[[nodiscard]] IqMetadata read_metadata(const std::filesystem::path& path);

[[nodiscard]] std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace siclab::iq_file
