#include "srd/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

#include "srd/error.hpp"
#include "srd/io.hpp"
#include "srd/profiler.hpp"
#include "srd/text.hpp"

namespace srd {

std::string_view to_string(GoldVariable v) {
  switch (v) {
    case GoldVariable::bd_diagnosis: return "bd_diagnosis";
    case GoldVariable::dob: return "dob";
    case GoldVariable::country: return "country";
    case GoldVariable::gender: return "gender";
  }
  return "?";
}

std::optional<GoldVariable> parse_gold_variable(std::string_view s) {
  for (auto v : {GoldVariable::bd_diagnosis, GoldVariable::dob, GoldVariable::country, GoldVariable::gender})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Normalized label or nullopt when outside the variable's vocabulary.
std::optional<std::string> normalize_label(GoldVariable v, std::string_view raw) {
  const auto t = trim(raw);
  if (t == kUnknownLabel) return std::string(kUnknownLabel);
  switch (v) {
    case GoldVariable::gender: {
      auto l = lower(t);
      if (l == "f" || l == "m" || l == "trans") return l;
      return std::nullopt;
    }
    case GoldVariable::bd_diagnosis: {
      auto l = lower(t);
      if (l == "yes" || l == "no") return l;
      return std::nullopt;
    }
    case GoldVariable::country: {
      auto u = upper(t);
      if (u.size() == 2 && std::isalpha(static_cast<unsigned char>(u[0])) &&
          std::isalpha(static_cast<unsigned char>(u[1])))
        return u;
      return std::nullopt;
    }
    case GoldVariable::dob:
      if (parse_iso_date(t)) return std::string(t);
      return std::nullopt;
  }
  return std::nullopt;
}

void check_header(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
  std::size_t i = 0;
  for (const char* n : names) {
    if (i >= header.size() || trim(header[i]) != n) {
      std::string expected;
      for (const char* m : names) expected += std::string(expected.empty() ? "" : ",") + m;
      throw ParseError(1, "header must be " + expected);
    }
    ++i;
  }
}

} // namespace

std::vector<GoldAnnotation> load_gold(std::string_view csv) {
  const auto rows = parse_csv(csv);
  std::vector<GoldAnnotation> out;
  if (rows.empty()) return out;
  check_header(rows[0], {"user_id", "variable", "label", "annotator_id"});
  std::set<std::tuple<std::string, GoldVariable, std::string>> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() != 4) throw ParseError(line, "expected 4 columns");
    GoldAnnotation a;
    a.user_id = std::string(trim(row[0]));
    if (a.user_id.empty()) throw ParseError(line, "empty user_id");
    auto var = parse_gold_variable(trim(row[1]));
    if (!var) throw ParseError(line, "unknown variable '" + row[1] + "'");
    a.variable = *var;
    auto label = normalize_label(a.variable, row[2]);
    if (!label) throw ParseError(line, "label '" + row[2] + "' invalid for " + std::string(to_string(a.variable)));
    a.label = std::move(*label);
    a.annotator_id = std::string(trim(row[3]));
    if (a.annotator_id.empty()) throw ParseError(line, "empty annotator_id");
    if (!seen.emplace(a.user_id, a.variable, a.annotator_id).second)
      throw ParseError(line, "duplicate annotation for user '" + a.user_id + "'");
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

std::map<std::string, std::vector<const GoldAnnotation*>> by_user(const std::vector<GoldAnnotation>& annotations,
                                                                  GoldVariable variable) {
  std::map<std::string, std::vector<const GoldAnnotation*>> out;
  for (const auto& a : annotations)
    if (a.variable == variable) out[a.user_id].push_back(&a);
  return out;
}

} // namespace

AgreementResult raw_agreement(const std::vector<GoldAnnotation>& annotations, GoldVariable variable) {
  AgreementResult r;
  for (const auto& [user, rows] : by_user(annotations, variable)) {
    if (rows.size() != 2) {
      r.warnings.push_back("user '" + user + "' has " + std::to_string(rows.size()) + " annotation(s) for " +
                           std::string(to_string(variable)) + "; skipped");
      continue;
    }
    ++r.n_users;
    if (rows[0]->label == rows[1]->label) ++r.n_agree;
  }
  if (r.n_users > 0) r.percent = 100.0 * static_cast<double>(r.n_agree) / static_cast<double>(r.n_users);
  return r;
}

std::vector<Resolution> load_resolutions(std::string_view csv) {
  const auto rows = parse_csv(csv);
  std::vector<Resolution> out;
  if (rows.empty()) return out;
  check_header(rows[0], {"user_id", "variable", "label"});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < 3) throw ParseError(r + 1, "expected 3 columns");
    auto var = parse_gold_variable(trim(row[1]));
    if (!var) throw ParseError(r + 1, "unknown variable '" + row[1] + "'");
    auto label = normalize_label(*var, row[2]);
    if (!label) throw ParseError(r + 1, "label '" + row[2] + "' invalid");
    out.push_back({std::string(trim(row[0])), *var, std::move(*label)});
  }
  return out;
}

ResolvedGold resolve_gold(const std::vector<GoldAnnotation>& annotations, const std::vector<Resolution>& resolutions) {
  std::map<std::pair<std::string, GoldVariable>, std::string> resolved_rows;
  for (const auto& r : resolutions) resolved_rows[{r.user_id, r.variable}] = r.label;

  ResolvedGold out;
  for (auto v : {GoldVariable::bd_diagnosis, GoldVariable::dob, GoldVariable::country, GoldVariable::gender}) {
    out.unresolved[v] = 0;
    for (const auto& [user, rows] : by_user(annotations, v)) {
      const bool agree = std::all_of(rows.begin(), rows.end(),
                                     [&](const GoldAnnotation* a) { return a->label == rows.front()->label; });
      if (agree) {
        out.labels[{user, v}] = rows.front()->label;
      } else if (auto it = resolved_rows.find({user, v}); it != resolved_rows.end()) {
        out.labels[{user, v}] = it->second;
      } else {
        ++out.unresolved[v];
      }
    }
  }
  return out;
}

std::map<std::string, std::string> gold_for(const ResolvedGold& gold, GoldVariable variable) {
  std::map<std::string, std::string> out;
  for (const auto& [key, label] : gold.labels) {
    if (key.second != variable || label == kUnknownLabel) continue;
    if (variable == GoldVariable::gender && label == "trans") continue;
    out[key.first] = label;
  }
  return out;
}

bool labels_match(GoldVariable variable, std::string_view predicted, std::string_view gold) {
  if (variable == GoldVariable::dob) {
    const auto p = parse_iso_date(predicted);
    const auto g = parse_iso_date(gold);
    if (!p || !g) return false;
    return std::llabs(*p - *g) <= 366LL * 86400;
  }
  if (variable == GoldVariable::country) return upper(predicted) == upper(gold);
  return lower(predicted) == lower(gold);
}

EvaluationResult score_method(GoldVariable variable, std::string method_name,
                              const std::map<std::string, std::string>& predictions,
                              const std::map<std::string, std::string>& gold, std::size_t population_size) {
  if (population_size == 0) throw DataError("population size must be positive");
  EvaluationResult r;
  r.variable = variable;
  r.method_name = std::move(method_name);
  r.population_size = population_size;
  r.n_gold = gold.size();
  r.n_predicted_all = predictions.size();
  for (const auto& [user, label] : gold) {
    auto it = predictions.find(user);
    if (it == predictions.end()) continue;
    ++r.n_predicted_on_gold;
    if (labels_match(variable, it->second, label)) ++r.n_correct;
  }
  if (r.n_predicted_on_gold > 0)
    r.accuracy = static_cast<double>(r.n_correct) / static_cast<double>(r.n_predicted_on_gold);
  if (r.n_gold > 0) r.coverage_test = static_cast<double>(r.n_predicted_on_gold) / static_cast<double>(r.n_gold);
  r.coverage_all = std::min(1.0, static_cast<double>(r.n_predicted_all) / static_cast<double>(population_size));
  return r;
}

MethodAgreement agreement_rate(const std::vector<std::map<std::string, std::string>>& methods) {
  if (methods.size() < 2) throw DataError("agreement needs at least two methods");
  MethodAgreement out;
  for (const auto& [user, label] : methods.front()) {
    bool all = true, same = true;
    for (std::size_t k = 1; k < methods.size() && all; ++k) {
      auto it = methods[k].find(user);
      if (it == methods[k].end())
        all = false;
      else if (it->second != label)
        same = false;
    }
    if (!all) continue;
    ++out.n_joint;
    if (same) ++out.n_joint_agree;
  }
  if (out.n_joint > 0) out.joint_percent = 100.0 * static_cast<double>(out.n_joint_agree) / static_cast<double>(out.n_joint);
  for (std::size_t a = 0; a < methods.size(); ++a)
    for (std::size_t b = a + 1; b < methods.size(); ++b) {
      PairAgreement p{a, b, 0, std::nullopt};
      std::size_t agree = 0;
      for (const auto& [user, label] : methods[a]) {
        auto it = methods[b].find(user);
        if (it == methods[b].end()) continue;
        ++p.n_users;
        if (it->second == label) ++agree;
      }
      if (p.n_users > 0) p.percent = 100.0 * static_cast<double>(agree) / static_cast<double>(p.n_users);
      out.pairs.push_back(p);
    }
  return out;
}

} // namespace srd
