#pragma once

#include <iosfwd>

#include "srd/config.hpp"

namespace srd {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitEmpty = 3;

struct RunOptions {
  unsigned threads = 1;
  std::ostream* log = nullptr;  // progress lines; null for silence
};

// Each command validates the config before writing anything, writes every
// file atomically and returns kExitOk or kExitEmpty. Config problems throw
// ConfigError, bad inputs DataError.
//
// Layout under output_dir:
//   store/                      ingest
//   cohort.jsonl evidence.jsonl removals.tsv review_candidates.tsv
//   detect_summary.tsv          detect
//   profiles.jsonl age_review.tsv                       profile
//   evaluation.tsv agreement.tsv evaluation_notes.txt   evaluate
//   report/*.tsv                report
//   export/ id_map.csv          export (the map stays outside export/)

int cmd_ingest(const PipelineConfig& config, const RunOptions& options);
int cmd_detect(const PipelineConfig& config, const RunOptions& options);
int cmd_profile(const PipelineConfig& config, const RunOptions& options);
int cmd_evaluate(const PipelineConfig& config, const RunOptions& options);
int cmd_report(const PipelineConfig& config, const RunOptions& options);
int cmd_export(const PipelineConfig& config, const RunOptions& options);

} // namespace srd
