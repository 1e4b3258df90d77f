#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "srd/detector.hpp"
#include "srd/profiler.hpp"

namespace srd {

/// One line of cohort.jsonl.
struct CohortRecord {
  std::string user_id;
  std::set<std::string> flags;
  std::set<std::string> diagnoses;
  std::vector<std::string> evidence_post_ids;
  std::size_t n_posts = 0;
};

nlohmann::json cohort_record_to_json(const CohortRecord& r);
CohortRecord cohort_record_from_json(const nlohmann::json& j);

/// Counts written by the detect stage and echoed in summary.tsv.
struct DetectSummary {
  std::size_t n_posts = 0;
  std::size_t n_detected = 0;
  std::size_t removed_psychotic = 0;
  std::size_t removed_bot = 0;
  std::size_t removed_manual = 0;
  std::size_t n_cohort = 0;
  std::size_t n_cohort_posts = 0;
};

std::string detect_summary_tsv(const DetectSummary& s);
DetectSummary parse_detect_summary(std::string_view tsv);

/// Percentages (one decimal) by largest remainder, so they add up to exactly
/// 100.0 whenever the denominator is positive.
std::vector<std::string> distribution_percents(const std::vector<std::size_t>& counts);

struct DistributionRow {
  std::string key;
  std::size_t n = 0;
  std::string percent;
};

struct Distribution {
  std::size_t denominator = 0;
  std::vector<DistributionRow> rows;
};

struct ReportBundle {
  DetectSummary detect;
  MddPolicy mdd_policy = MddPolicy::plain;
  std::size_t cohort_size = 0;
  std::vector<std::pair<std::string, std::size_t>> comorbidity_counts;  // label order of kComorbidityLabels
  std::size_t any_additional = 0;
  Distribution age_first_post;
  Distribution age_mean;
  Distribution gender;
  Distribution countries;  // top N plus "other"
  std::optional<double> mean_first_post_age;
};

ReportBundle build_report(const std::vector<CohortRecord>& cohort, const std::vector<UserProfile>& profiles,
                          const DetectSummary& detect, MddPolicy policy, std::size_t top_n);

/// key -> extra columns; header names the columns.
struct Baseline {
  std::vector<std::string> columns;
  std::map<std::string, std::vector<std::string>> rows;
};

/// TSV with a header row; the first column is the join key.
Baseline parse_baseline(std::string_view tsv);

/// File name -> TSV content for comorbidity, age_groups, gender, countries
/// and summary. Baselines are keyed by report name.
std::map<std::string, std::string> render_report(const ReportBundle& bundle,
                                                 const std::map<std::string, Baseline>& baselines);

} // namespace srd
