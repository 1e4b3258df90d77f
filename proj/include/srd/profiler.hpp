#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "srd/corpus.hpp"

namespace srd {

/// 365.25 days.
inline constexpr std::int64_t kSecondsPerYear = 31557600;
inline constexpr int kMinAge = 13;
inline constexpr int kMaxAge = 99;

enum class Gender { f, m };

std::string_view to_string(Gender g);
std::optional<Gender> parse_gender(std::string_view s);

// ---------------------------------------------------------------------------
// Self-reported age and gender from submission titles.

struct SelfReportCandidate {
  std::string post_id;
  int age = 0;
  Gender gender = Gender::f;
  std::size_t start = 0;  // byte span of the token in the normalized title
  std::size_t end = 0;
  bool first_person = false;
};

/// Finds bracketed/parenthesized age-gender tokens: [17f], (17 F), [f17],
/// [17/m], ... with a two-digit age in [13, 99] and f/m. A token is first
/// person when a pronoun (i, me, my) ends at most 3 non-space characters
/// before it, so "I'm [25M]" counts.
std::vector<SelfReportCandidate> extract_self_report(std::string_view title, std::string_view post_id = {});

struct DatedCandidate {
  SelfReportCandidate candidate;
  std::int64_t post_utc = 0;
};

struct SelfReport {
  std::optional<std::int64_t> dob_utc;  // absent when the dob spread exceeds 3 years
  std::optional<Gender> gender;         // absent on a tie
  bool age_unresolved = false;
};

/// Resolves all of a user's candidates: first-person ones when present,
/// else all; dob = median of per-candidate dobs (spread > 3 years leaves the
/// age unresolved); gender = strict majority. nullopt when there are no
/// candidates.
std::optional<SelfReport> choose_self_report(std::span<const DatedCandidate> candidates);

/// post time minus age x 365.25 days; nullopt outside [13, 99].
std::optional<std::int64_t> estimate_dob(int age_years, std::int64_t post_utc);

double age_at(std::int64_t dob_utc, std::int64_t t_utc);

/// "YYYY-MM-DD" (UTC, proleptic Gregorian).
std::string iso_date(std::int64_t utc);
/// Midnight UTC of an ISO date; nullopt when malformed.
std::optional<std::int64_t> parse_iso_date(std::string_view s);

struct PostingAges {
  double first_post_age = 0.0;
  double mean_posting_age = 0.0;
  bool post_before_13 = false;
};

/// Age at the earliest post and mean age over all posts. `post_times` must
/// be non-empty.
PostingAges posting_ages(std::int64_t dob_utc, std::span<const std::int64_t> post_times);

// ---------------------------------------------------------------------------
// Age groups.

enum class ReportAgeGroup { g13_17, g18_29, g30_49, g50_64, g65_plus };
inline constexpr ReportAgeGroup kReportAgeGroups[] = {ReportAgeGroup::g13_17, ReportAgeGroup::g18_29,
                                                      ReportAgeGroup::g30_49, ReportAgeGroup::g50_64,
                                                      ReportAgeGroup::g65_plus};

std::string_view to_string(ReportAgeGroup g);

/// [13,18) [18,30) [30,50) [50,65) [65,inf). Throws DataError below 13.
ReportAgeGroup bucket_age(double age_years);

enum class HamAgeGroup { under14, g14_23, g24_45, g46_65, g66_plus };

std::string_view to_string(HamAgeGroup g);
std::optional<HamAgeGroup> parse_ham_group(std::string_view s);

/// Age used as the group's point estimate: the midpoint of the label's
/// inclusive bounds (24-45 -> 34.5); "<14" spans [13,14) and "66+" [66,90).
double ham_midpoint_age(HamAgeGroup g);

// ---------------------------------------------------------------------------
// Backend predictions.

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const LatLon&) const = default;
};

enum class PredictionAttribute { age_group, gender, location };

struct BackendPrediction {
  std::string user_id;
  PredictionAttribute attribute = PredictionAttribute::age_group;
  std::variant<HamAgeGroup, double, LatLon> value;
  double score = 0.0;
  std::string model_id;
};

/// predictions.jsonl rows {user_id, attribute, value, score, model_id}.
/// value: HAM label string (age_group), feminine score in [0,1] (gender),
/// [lat, lon] on the 0.5 degree grid (location). Throws ParseError.
std::vector<BackendPrediction> parse_predictions(std::string_view jsonl);

/// Gender rows whose model_id starts with this prefix come from the
/// username model; other gender rows are the language-use model.
inline constexpr std::string_view kUsernameModelPrefix = "username";

struct UserPredictions {
  std::optional<HamAgeGroup> age_group;
  std::optional<double> username_score;
  std::optional<double> language_gender;
  std::optional<LatLon> location;
};

/// Per user and method, keeps the highest-score prediction (first on ties).
std::map<std::string, UserPredictions> collect_predictions(std::span<const BackendPrediction> predictions);

// ---------------------------------------------------------------------------
// Country lookup.

/// 0.5 degree grid cell -> ISO 3166 alpha-2.
class CountryGrid {
 public:
  /// country_grid.csv with header lat,lon,iso2. Throws ParseError on rows
  /// off the 0.5 grid, out of range, or without a two-letter code.
  static CountryGrid parse(std::string_view csv);

  std::size_t size() const { return cells_.size(); }

  /// Exact cell, else the nearest mapped cell within 2.0 degrees of
  /// great-circle arc (ties: smaller lat, then lon), else nullopt.
  std::optional<std::string> lookup(double lat, double lon) const;

 private:
  std::map<std::pair<int, int>, std::string> cells_;  // keyed by (lat*2, lon*2)
};

inline constexpr double kCountryFallbackDegrees = 2.0;

/// Central angle between two points, in degrees.
double great_circle_degrees(LatLon a, LatLon b);

// ---------------------------------------------------------------------------
// Profiles.

enum class AgeSource { self_reported, language_use, none };
enum class GenderSource { username, self_reported, language_use, none };

std::string_view to_string(AgeSource s);
std::string_view to_string(GenderSource s);

enum class ProfileFlag { age_review_low, age_review_high, age_discarded_under13, age_post_under13 };

std::string_view to_string(ProfileFlag f);

/// Outputs of the individual methods, kept for evaluation.
struct MethodValues {
  std::optional<std::int64_t> self_reported_dob;
  std::optional<double> self_reported_mean_age;
  std::optional<std::int64_t> language_use_dob;
  std::optional<HamAgeGroup> language_use_group;
  std::optional<Gender> username_gender;
  std::optional<Gender> self_reported_gender;
  std::optional<Gender> language_use_gender;
};

struct UserProfile {
  std::string user_id;
  std::optional<std::int64_t> dob_utc;
  AgeSource age_source = AgeSource::none;
  std::optional<double> first_post_age;
  std::optional<double> mean_posting_age;
  std::optional<ReportAgeGroup> age_group_first_post;
  std::optional<ReportAgeGroup> age_group_mean;
  std::optional<Gender> gender;
  GenderSource gender_source = GenderSource::none;
  std::optional<std::string> country;
  std::set<ProfileFlag> flags;
  MethodValues methods;
};

/// Review flags for self-reported mean posting age below 16 or above 60
/// (values kept), and drops a language-use dob implying an age below 13 at
/// account creation.
void apply_age_corrections(UserProfile& profile, std::optional<std::int64_t> account_created_utc);

struct AgeAssignment {
  std::optional<std::int64_t> dob_utc;
  AgeSource source = AgeSource::none;
};

/// Self-reported dob when present, else the (non-discarded) language-use dob.
AgeAssignment hybrid_age(const MethodValues& methods);

/// <= 0.1 -> m, >= 0.9 -> f, otherwise no decision.
std::optional<Gender> username_gender_decision(double score);

/// Language-use gender value is a feminine score decided at 0.5.
Gender language_gender_decision(double value);

struct GenderAssignment {
  std::optional<Gender> gender;
  GenderSource source = GenderSource::none;
};

/// Username > Self-reported > Language use, ignoring disagreements.
GenderAssignment hybrid_gender(std::optional<double> username_score, std::optional<Gender> self_reported,
                               std::optional<double> language_value);

/// Everything the profiler needs about one user.
struct ProfileInput {
  std::string user_id;
  std::vector<const Post*> posts;  // all of the user's posts
  std::optional<std::int64_t> account_created_utc;
  const UserPredictions* predictions = nullptr;
};

UserProfile build_profile(const ProfileInput& input, const CountryGrid* grid);

nlohmann::json profile_to_json(const UserProfile& profile);
UserProfile profile_from_json(const nlohmann::json& j);

} // namespace srd
