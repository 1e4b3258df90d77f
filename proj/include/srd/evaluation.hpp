#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace srd {

enum class GoldVariable { bd_diagnosis, dob, country, gender };

std::string_view to_string(GoldVariable v);
std::optional<GoldVariable> parse_gold_variable(std::string_view s);

/// Label for annotations the annotators could not determine.
inline constexpr std::string_view kUnknownLabel = "?";

struct GoldAnnotation {
  std::string user_id;
  GoldVariable variable = GoldVariable::bd_diagnosis;
  std::string label;  // normalized: lower case except country (upper case)
  std::string annotator_id;
};

/// gold.csv with header user_id,variable,label,annotator_id. Labels are
/// validated per variable (gender f|m|trans, bd_diagnosis yes|no, country
/// ISO alpha-2, dob YYYY-MM-DD; "?" always allowed). Throws ParseError with
/// the CSV line on vocabulary violations, unknown variables and duplicate
/// (user, variable, annotator) rows.
std::vector<GoldAnnotation> load_gold(std::string_view csv);

struct AgreementResult {
  std::size_t n_users = 0;  // users annotated by exactly two annotators
  std::size_t n_agree = 0;
  std::optional<double> percent;
  std::vector<std::string> warnings;
};

/// Raw (chance-uncorrected) agreement between two annotators. Users without
/// exactly two annotations for the variable are skipped with a warning.
AgreementResult raw_agreement(const std::vector<GoldAnnotation>& annotations, GoldVariable variable);

struct Resolution {
  std::string user_id;
  GoldVariable variable = GoldVariable::bd_diagnosis;
  std::string label;
};

/// resolutions.csv with header user_id,variable,label.
std::vector<Resolution> load_resolutions(std::string_view csv);

struct ResolvedGold {
  std::map<std::pair<std::string, GoldVariable>, std::string> labels;
  std::map<GoldVariable, std::size_t> unresolved;  // disagreements without a resolution row
};

/// Agreeing users keep the shared label; disagreements take the resolution
/// row's label or stay unresolved. Singly annotated users keep their label.
ResolvedGold resolve_gold(const std::vector<GoldAnnotation>& annotations, const std::vector<Resolution>& resolutions);

/// The scoreable gold labels for one variable: excludes "?" and, for
/// gender, "trans".
std::map<std::string, std::string> gold_for(const ResolvedGold& gold, GoldVariable variable);

/// dob: within 366 days; everything else: exact.
bool labels_match(GoldVariable variable, std::string_view predicted, std::string_view gold);

struct EvaluationResult {
  GoldVariable variable = GoldVariable::bd_diagnosis;
  std::string method_name;
  std::size_t n_gold = 0;
  std::size_t n_predicted_on_gold = 0;
  std::size_t n_correct = 0;
  std::size_t n_predicted_all = 0;
  std::size_t population_size = 0;
  std::optional<double> accuracy;       // n_correct / n_predicted_on_gold
  std::optional<double> coverage_test;  // n_predicted_on_gold / n_gold
  double coverage_all = 0.0;            // n_predicted_all / population_size
  std::string notes;
};

/// Scores predictions (user -> label over the whole population) against
/// gold labels from gold_for. Fractions are in [0,1]. Throws DataError when
/// population_size is 0.
EvaluationResult score_method(GoldVariable variable, std::string method_name,
                              const std::map<std::string, std::string>& predictions,
                              const std::map<std::string, std::string>& gold, std::size_t population_size);

struct PairAgreement {
  std::size_t a = 0, b = 0;  // method indices
  std::size_t n_users = 0;
  std::optional<double> percent;
};

struct MethodAgreement {
  std::size_t n_joint = 0;  // users labelled by every method
  std::size_t n_joint_agree = 0;
  std::optional<double> joint_percent;
  std::vector<PairAgreement> pairs;
};

/// Agreement among >= 2 methods: joint over users all methods label,
/// pairwise over users both label. Percentages in [0,100].
MethodAgreement agreement_rate(const std::vector<std::map<std::string, std::string>>& methods);

} // namespace srd
