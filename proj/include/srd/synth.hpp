#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "srd/corpus.hpp"
#include "srd/profiler.hpp"

namespace srd {

/// What the generator planted for one user. Values are derived from the
/// generator's own plan, never from running the pipeline.
struct SynthTruth {
  std::string user_id;
  std::string username;
  bool detected = false;     // has a BD self-report post
  std::string removal;       // "", "psychotic", "bot" or "manual"
  bool in_cohort = false;
  std::set<std::string> diagnoses;  // BD, comorbidities, MDD_conservative
  std::set<std::string> flags;      // cohort flags kept on surviving users
  std::optional<ReportAgeGroup> age_first_post;
  std::optional<ReportAgeGroup> age_mean;
  std::optional<Gender> gender;
  std::optional<std::string> country;
  std::optional<std::int64_t> true_dob;  // self-reported users only
};

struct GridCell {
  double lat = 0.0;
  double lon = 0.0;
  std::string iso2;
};

struct SynthCorpus {
  std::vector<Post> posts;
  std::vector<UserAccount> accounts;
  std::string predictions_jsonl;
  std::string review_csv;
  std::string gold_csv;
  std::string resolutions_csv;
  std::map<std::string, SynthTruth> truth;
};

struct SynthOptions {
  std::size_t n_users = 500;
  std::uint64_t seed = 1;
  std::size_t n_gold = 100;
};

/// Plants a corpus; `cells` are known country grid cells to draw locations
/// from. Needs at least 100 users.
SynthCorpus generate_synth(const SynthOptions& options, const std::vector<GridCell>& cells);

/// Reads a lat,lon,iso2 CSV into cells (no validation beyond the header).
std::vector<GridCell> read_grid_cells(const std::filesystem::path& csv);

/// Writes posts.jsonl (pushshift field names, plus two malformed lines and
/// one duplicate), accounts.jsonl, predictions.jsonl, review.csv, gold.csv,
/// resolutions.csv, secret.txt, truth.jsonl and srd.conf (output_dir = out).
void write_synth(const std::filesystem::path& dir, const SynthCorpus& corpus,
                 const std::filesystem::path& patterns_dir, const std::filesystem::path& country_grid);

} // namespace srd
