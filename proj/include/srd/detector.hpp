#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srd/corpus.hpp"
#include "srd/pattern.hpp"

namespace srd {

inline constexpr std::size_t kDefaultThresholdChars = 55;

/// Diagnosis labels with condition-term resources. BD defines the cohort;
/// the rest are comorbidities. MDD_conservative is derived, never matched.
inline const std::vector<std::string> kComorbidityLabels = {
    "MDD", "Anxiety", "ADHD", "BPD", "PTSD", "Psychotic", "OCD", "ASD", "ED"};
inline const std::string kCohortLabel = "BD";
inline const std::string kConservativeMdd = "MDD_conservative";

enum class Decision { matched, excluded_by_pattern, no_condition_term, no_inclusion, proximity_failed };

std::string_view to_string(Decision d);

struct DiagnosisEvidence {
  std::string post_id;
  std::string diagnosis_label;
  Decision decision = Decision::no_condition_term;
  std::optional<MatchSpan> inclusion_span;
  std::optional<MatchSpan> condition_span;
  std::optional<std::size_t> distance_chars;
  std::optional<std::size_t> exclusion_pattern_id;  // index into PatternSet::exclusion_patterns

  bool operator==(const DiagnosisEvidence&) const = default;
};

enum class CohortFlag { bot_name, high_volume, manual_removed, psychotic_excluded };

std::string_view to_string(CohortFlag f);

struct CohortEntry {
  std::string user_id;
  std::vector<DiagnosisEvidence> evidence;  // matched only, by (created_utc, post_id)
  std::set<CohortFlag> flags;
};

using Cohort = std::map<std::string, CohortEntry>;

struct ComorbidityProfile {
  std::string user_id;
  std::set<std::string> diagnoses;
};

/// The matching document of a post: title and quote-stripped body joined by
/// one space, then normalized.
std::string post_document(const Post& post);

/// Classifies one post. Order: condition presence, exclusion (vetoes the
/// post), inclusion presence, proximity. On a match, reports the closest
/// (condition, inclusion) pair, earliest first on ties.
DiagnosisEvidence classify_post(const Post& post, const CompiledMatcher& matcher,
                                std::size_t threshold_chars = kDefaultThresholdChars);

/// Same as classify_post over an already built document.
DiagnosisEvidence classify_document(std::string_view post_id, std::string_view document,
                                    const CompiledMatcher& matcher, std::size_t threshold_chars);

/// Users with at least one matched post for `matcher`'s label.
Cohort detect_cohort(std::span<const Post> posts, const CompiledMatcher& matcher,
                     std::size_t threshold_chars = kDefaultThresholdChars, unsigned threads = 1);

struct UserFlag {
  std::string user_id;
  CohortFlag flag;
  auto operator<=>(const UserFlag&) const = default;
};

inline constexpr std::uint64_t kMaxSubmissions = 1500;
inline constexpr std::uint64_t kMaxComments = 200000;

/// Bot screening: high_volume above 1500 submissions or 200000 comments,
/// bot_name when the lowercased username contains "bot" or "auto". Flags
/// only mark accounts for review.
std::set<UserFlag> flag_bot_candidates(const std::map<std::string, UserStats>& user_stats,
                                       std::span<const UserAccount> accounts);

enum class ReviewAction { remove, keep };

struct ReviewEntry {
  std::string user_id;
  ReviewAction action = ReviewAction::keep;
  std::string reason;
};

/// review.csv with header user_id,action,reason. Throws ParseError on an
/// unknown action.
std::vector<ReviewEntry> parse_review_csv(std::string_view text);

struct RemovalCounts {
  std::size_t psychotic = 0;
  std::size_t bot = 0;
  std::size_t manual = 0;
};

struct Removal {
  std::string user_id;
  std::string reason;  // psychotic, bot, manual
};

struct ExclusionResult {
  Cohort cohort;
  RemovalCounts counts;
  std::vector<Removal> removed;       // sorted by user_id
  std::vector<std::string> warnings;  // e.g. review rows for unknown users
};

/// Drops users with matched Psychotic evidence, flagged users whose review
/// row says remove (bots), and unflagged users whose review row says remove
/// (manual). Each removed user counts once, in that precedence. Bot flags
/// from `flags` are recorded on surviving entries.
ExclusionResult apply_exclusions(const Cohort& cohort, const std::set<std::string>& psychotic_users,
                                 const std::set<UserFlag>& flags, std::span<const ReviewEntry> review);

/// Per-label matchers for comorbidity extraction. Must contain BD and every
/// label in kComorbidityLabels that is to be extracted.
using MatcherSet = std::map<std::string, CompiledMatcher>;

/// Every cohort user's diagnosis set: BD plus each label with >= 1 matched
/// post; MDD_conservative when an MDD-matched post is not also BD-matched.
std::map<std::string, ComorbidityProfile> extract_comorbidities(std::span<const Post> posts,
                                                                const std::set<std::string>& cohort_users,
                                                                const MatcherSet& matchers,
                                                                std::size_t threshold_chars = kDefaultThresholdChars,
                                                                unsigned threads = 1);

/// Users with a post matched for MDD but not for BD.
std::set<std::string> conservative_mdd(std::span<const Post> posts, const std::set<std::string>& cohort_users,
                                       const CompiledMatcher& mdd_matcher, const CompiledMatcher& bd_matcher,
                                       std::size_t threshold_chars = kDefaultThresholdChars);

enum class MddPolicy { plain, conservative };

struct ComorbidityTable {
  std::size_t cohort_size = 0;
  std::vector<std::pair<std::string, double>> rates;  // kComorbidityLabels order, MDD per policy
  std::map<std::string, std::size_t> counts;
  double any_additional = 0.0;
  std::size_t any_additional_count = 0;
};

/// Percent of the cohort per label, plus users with >= 1 non-BD label. The
/// MDD row and the any-additional count follow `policy`. Throws DataError
/// when cohort_size is 0.
ComorbidityTable comorbidity_rates(const std::map<std::string, ComorbidityProfile>& profiles,
                                   std::size_t cohort_size, MddPolicy policy = MddPolicy::plain);

} // namespace srd
