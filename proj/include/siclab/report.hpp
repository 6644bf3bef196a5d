#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "siclab/harness.hpp"

namespace siclab::report {

enum class Format { Csv, JsonLines };

[[nodiscard]] Format parse_format(std::string_view name);

/// Column header of the CSV report.
[[nodiscard]] std::string_view csv_header();

/// Header plus one row per record; 6 significant digits, "NA" for invalid values.
[[nodiscard]] std::string to_csv(const std::vector<harness::ExperimentRecord>& records);

/// One JSON object per line with every record field at full precision.
[[nodiscard]] std::string to_jsonl(const std::vector<harness::ExperimentRecord>& records);

[[nodiscard]] std::vector<harness::ExperimentRecord> from_jsonl(std::string_view text);

/// Writes the report; throws InputError on no records and IoError when the path is unwritable.
void emit_report(const std::vector<harness::ExperimentRecord>& records, Format format,
                 const std::filesystem::path& out_path);

}  // namespace siclab::report
