#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "srd/corpus.hpp"
#include "srd/detector.hpp"

namespace srd {

/// Pipeline settings from a flat "key = value" file ('#' comments). Relative
/// paths resolve against the config file's directory.
///
///   posts, accounts, patterns, predictions, country_grid, gold,
///   resolutions, review, secret_file, output_dir   paths
///   threshold_chars = 55          proximity threshold (>= 1)
///   mdd_policy = plain|conservative
///   top_n = 5                     rows in countries.tsv
///   input_schema = pushshift|canonical
///   schema.<field> = name[|name...]   per-field overrides
///   baseline.<report> = path      report in comorbidity|age_groups|gender|countries
///   gold_sampling = <note>        provenance of the gold sample, echoed in notes
struct PipelineConfig {
  std::filesystem::path config_dir;
  std::filesystem::path posts;
  std::filesystem::path accounts;
  std::filesystem::path patterns;
  std::filesystem::path predictions;
  std::filesystem::path country_grid;
  std::filesystem::path gold;
  std::filesystem::path resolutions;
  std::filesystem::path review;
  std::filesystem::path secret_file;
  std::filesystem::path output_dir;
  std::size_t threshold_chars = kDefaultThresholdChars;
  MddPolicy mdd_policy = MddPolicy::plain;
  std::size_t top_n = 5;
  SchemaMap schema = SchemaMap::pushshift();
  std::map<std::string, std::filesystem::path> baselines;
  std::string gold_sampling;
};

/// Throws ConfigError on syntax errors, unknown keys or bad values.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);

PipelineConfig load_config(const std::filesystem::path& path);

/// Checks invariants every subcommand relies on: output_dir set,
/// threshold >= 1, every configured path exists. Throws ConfigError.
void validate_config(const PipelineConfig& config);

} // namespace srd
