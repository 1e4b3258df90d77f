#pragma once

// Small fixture builders shared by the unit tests and the acceptance runner.

#include <map>
#include <string>
#include <vector>

#include "srd/detector.hpp"
#include "srd/evaluation.hpp"
#include "srd/pattern.hpp"

namespace fixtures {

inline std::string uid(int i) {
  std::string s = std::to_string(i);
  return "u" + std::string(4 - std::min<std::size_t>(4, s.size()), '0') + s;
}

/// gold.csv with n doubly annotated bd_diagnosis users, `agree` of whom agree.
inline std::string agreement_csv(int n, int agree) {
  std::string csv = "user_id,variable,label,annotator_id\n";
  for (int i = 0; i < n; ++i) {
    csv += uid(i) + ",bd_diagnosis,yes,a1\n";
    csv += uid(i) + ",bd_diagnosis," + std::string(i < agree ? "yes" : "no") + ",a2\n";
  }
  return csv;
}

struct ScoreFixture {
  std::map<std::string, std::string> predictions;
  std::map<std::string, std::string> gold;
  std::size_t population = 0;
};

/// n_gold gold users, n_predicted of them predicted, n_correct of those
/// right; the population holds the gold users plus `extra` unlabelled users,
/// `extra_predicted` of which have a prediction.
inline ScoreFixture score_fixture(int n_gold, int n_predicted, int n_correct, int extra, int extra_predicted) {
  ScoreFixture f;
  for (int i = 0; i < n_gold; ++i) {
    f.gold[uid(i)] = "yes";
    if (i < n_predicted) f.predictions[uid(i)] = i < n_correct ? "yes" : "no";
  }
  for (int i = 0; i < extra_predicted; ++i) f.predictions[uid(n_gold + i)] = "yes";
  f.population = static_cast<std::size_t>(n_gold + extra);
  return f;
}

/// Two methods over `n` users agreeing on the first `agree`.
inline std::vector<std::map<std::string, std::string>> agreeing_methods(int n, int agree) {
  std::vector<std::map<std::string, std::string>> m(2);
  for (int i = 0; i < n; ++i) {
    m[0][uid(i)] = "f";
    m[1][uid(i)] = i < agree ? "f" : "m";
  }
  return m;
}

/// Three example patterns per kind, a handful of terms each.
inline srd::PatternSet example_patterns() {
  srd::PatternSet ps;
  ps.inclusion_patterns = {"As someone with a diagnos*", "my recent CONDITION diagnos*",
                           "I went to a DOCTOR and got diagnos*"};
  ps.exclusion_patterns = {"Not formally diagnos*", "self diagnos*", "she\xE2\x80\x99s diagnos*"};
  ps.condition_terms["BD"] = {"Bipolar", "manic depression", "BD-I", "BD-II", "cyclothymia"};
  ps.doctor_terms = {"Doctor", "pdoc", "shrink"};
  return ps;
}

} // namespace fixtures
