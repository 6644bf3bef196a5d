#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "siclab/harness.hpp"

namespace siclab::config {

constexpr int kSchemaVersion = 1;

/**
 * @brief Applies `key = value` lines to cfg.
 *
 * '#' starts a comment; lists are written `[a, b, c]`. Unknown keys and malformed
 * values raise ConfigError naming the key and line; the result is validated.
 */
void apply_config_text(harness::SweepConfig& cfg, std::string_view text);

/// Defaults, then the file.
[[nodiscard]] harness::SweepConfig parse_config(const std::filesystem::path& path);

/// Every key with its current value; parse(serialize(c)) reproduces c.
[[nodiscard]] std::string serialize_config(const harness::SweepConfig& cfg);

}  // namespace siclab::config
