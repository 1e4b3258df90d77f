#include "srd/detector.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "srd/error.hpp"
#include "srd/io.hpp"
#include "srd/parallel.hpp"
#include "srd/text.hpp"

namespace srd {

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::matched: return "matched";
    case Decision::excluded_by_pattern: return "excluded_by_pattern";
    case Decision::no_condition_term: return "no_condition_term";
    case Decision::no_inclusion: return "no_inclusion";
    case Decision::proximity_failed: return "proximity_failed";
  }
  return "?";
}

std::string_view to_string(CohortFlag f) {
  switch (f) {
    case CohortFlag::bot_name: return "bot_name";
    case CohortFlag::high_volume: return "high_volume";
    case CohortFlag::manual_removed: return "manual_removed";
    case CohortFlag::psychotic_excluded: return "psychotic_excluded";
  }
  return "?";
}

std::string post_document(const Post& post) {
  std::string doc;
  if (post.title) {
    doc = *post.title;
    doc.push_back(' ');
  }
  doc += strip_quotes(post.body);
  return normalize_text(doc);
}

DiagnosisEvidence classify_document(std::string_view post_id, std::string_view document,
                                    const CompiledMatcher& matcher, std::size_t threshold_chars) {
  DiagnosisEvidence ev;
  ev.post_id = std::string(post_id);
  ev.diagnosis_label = matcher.label();

  const auto spans = matcher.find_matches(document);
  std::vector<MatchSpan> conditions, inclusions;
  const MatchSpan* exclusion = nullptr;
  for (const auto& s : spans) {
    switch (s.kind) {
      case SpanKind::condition: conditions.push_back(s); break;
      case SpanKind::inclusion: inclusions.push_back(s); break;
      case SpanKind::exclusion:
        if (exclusion == nullptr) exclusion = &s;
        break;
      case SpanKind::doctor: break;
    }
  }

  if (conditions.empty()) {
    ev.decision = Decision::no_condition_term;
    return ev;
  }
  if (exclusion != nullptr) {
    ev.decision = Decision::excluded_by_pattern;
    ev.exclusion_pattern_id = matcher.alternatives()[exclusion->pattern_id].source;
    return ev;
  }
  if (inclusions.empty()) {
    ev.decision = Decision::no_inclusion;
    ev.condition_span = conditions.front();
    return ev;
  }

  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& c : conditions)
    for (const auto& i : inclusions) {
      const auto d = span_distance(c, i, document);
      if (d < best) {
        best = d;
        ev.condition_span = c;
        ev.inclusion_span = i;
      }
    }
  ev.distance_chars = best;
  ev.decision = best < threshold_chars ? Decision::matched : Decision::proximity_failed;
  return ev;
}

DiagnosisEvidence classify_post(const Post& post, const CompiledMatcher& matcher, std::size_t threshold_chars) {
  return classify_document(post.post_id, post_document(post), matcher, threshold_chars);
}

namespace {

void order_evidence(std::vector<DiagnosisEvidence>& evidence,
                    const std::map<std::string_view, std::int64_t>& post_time) {
  std::sort(evidence.begin(), evidence.end(), [&](const DiagnosisEvidence& a, const DiagnosisEvidence& b) {
    const auto ta = post_time.at(a.post_id);
    const auto tb = post_time.at(b.post_id);
    if (ta != tb) return ta < tb;
    return a.post_id < b.post_id;
  });
}

} // namespace

Cohort detect_cohort(std::span<const Post> posts, const CompiledMatcher& matcher, std::size_t threshold_chars,
                     unsigned threads) {
  std::vector<std::optional<DiagnosisEvidence>> results(posts.size());
  parallel_for(posts.size(), threads, [&](std::size_t i) {
    auto ev = classify_post(posts[i], matcher, threshold_chars);
    if (ev.decision == Decision::matched) results[i] = std::move(ev);
  });

  Cohort cohort;
  std::map<std::string_view, std::int64_t> post_time;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (!results[i]) continue;
    auto& entry = cohort[posts[i].user_id];
    entry.user_id = posts[i].user_id;
    entry.evidence.push_back(std::move(*results[i]));
    post_time.emplace(posts[i].post_id, posts[i].created_utc);
  }
  for (auto& [user, entry] : cohort) order_evidence(entry.evidence, post_time);
  return cohort;
}

std::set<UserFlag> flag_bot_candidates(const std::map<std::string, UserStats>& user_stats,
                                       std::span<const UserAccount> accounts) {
  std::set<UserFlag> flags;
  for (const auto& [user, s] : user_stats)
    if (s.n_submissions > kMaxSubmissions || s.n_comments > kMaxComments)
      flags.insert({user, CohortFlag::high_volume});
  for (const auto& a : accounts) {
    std::string name = a.username;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name.find("bot") != std::string::npos || name.find("auto") != std::string::npos)
      flags.insert({a.user_id, CohortFlag::bot_name});
  }
  return flags;
}

std::vector<ReviewEntry> parse_review_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  std::vector<ReviewEntry> out;
  if (rows.empty()) return out;
  const auto& header = rows.front();
  if (header.size() < 2 || trim(header[0]) != "user_id" || trim(header[1]) != "action")
    throw ParseError(1, "review file header must start with user_id,action");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < 2) throw ParseError(r + 1, "review row needs user_id and action");
    ReviewEntry e;
    e.user_id = std::string(trim(row[0]));
    const auto action = trim(row[1]);
    if (action == "remove")
      e.action = ReviewAction::remove;
    else if (action == "keep")
      e.action = ReviewAction::keep;
    else
      throw ParseError(r + 1, "unknown review action '" + std::string(action) + "'");
    if (row.size() > 2) e.reason = row[2];
    out.push_back(std::move(e));
  }
  return out;
}

ExclusionResult apply_exclusions(const Cohort& cohort, const std::set<std::string>& psychotic_users,
                                 const std::set<UserFlag>& flags, std::span<const ReviewEntry> review) {
  std::map<std::string, std::set<CohortFlag>> flags_by_user;
  for (const auto& f : flags) flags_by_user[f.user_id].insert(f.flag);

  std::set<std::string> review_removed;
  ExclusionResult result;
  for (const auto& e : review) {
    if (!cohort.contains(e.user_id)) {
      result.warnings.push_back("review entry for unknown user '" + e.user_id + "'");
      continue;
    }
    if (e.action == ReviewAction::remove) review_removed.insert(e.user_id);
  }

  for (const auto& [user, entry] : cohort) {
    auto fl = flags_by_user.find(user);
    const bool flagged = fl != flags_by_user.end() &&
                         (fl->second.contains(CohortFlag::bot_name) || fl->second.contains(CohortFlag::high_volume));
    if (psychotic_users.contains(user)) {
      ++result.counts.psychotic;
      result.removed.push_back({user, "psychotic"});
    } else if (review_removed.contains(user) && flagged) {
      ++result.counts.bot;
      result.removed.push_back({user, "bot"});
    } else if (review_removed.contains(user)) {
      ++result.counts.manual;
      result.removed.push_back({user, "manual"});
    } else {
      CohortEntry kept = entry;
      if (fl != flags_by_user.end())
        for (auto f : fl->second)
          if (f == CohortFlag::bot_name || f == CohortFlag::high_volume) kept.flags.insert(f);
      result.cohort.emplace(user, std::move(kept));
    }
  }
  return result;
}

std::map<std::string, ComorbidityProfile> extract_comorbidities(std::span<const Post> posts,
                                                                const std::set<std::string>& cohort_users,
                                                                const MatcherSet& matchers,
                                                                std::size_t threshold_chars, unsigned threads) {
  auto bd = matchers.find(kCohortLabel);
  if (bd == matchers.end()) throw DataError("comorbidity extraction needs a BD matcher");

  // Per post: the set of matched labels (BD included).
  std::vector<std::vector<std::string>> matched(posts.size());
  parallel_for(posts.size(), threads, [&](std::size_t i) {
    const Post& p = posts[i];
    if (!cohort_users.contains(p.user_id)) return;
    const std::string doc = post_document(p);
    for (const auto& [label, m] : matchers)
      if (classify_document(p.post_id, doc, m, threshold_chars).decision == Decision::matched)
        matched[i].push_back(label);
  });

  std::map<std::string, ComorbidityProfile> profiles;
  for (const auto& u : cohort_users) profiles[u] = {u, {kCohortLabel}};
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (matched[i].empty()) continue;
    auto& prof = profiles[posts[i].user_id];
    bool mdd = false, bd_post = false;
    for (const auto& label : matched[i]) {
      prof.diagnoses.insert(label);
      mdd |= label == "MDD";
      bd_post |= label == kCohortLabel;
    }
    if (mdd && !bd_post) prof.diagnoses.insert(kConservativeMdd);
  }
  return profiles;
}

std::set<std::string> conservative_mdd(std::span<const Post> posts, const std::set<std::string>& cohort_users,
                                       const CompiledMatcher& mdd_matcher, const CompiledMatcher& bd_matcher,
                                       std::size_t threshold_chars) {
  std::set<std::string> out;
  for (const auto& p : posts) {
    if (!cohort_users.contains(p.user_id) || out.contains(p.user_id)) continue;
    const std::string doc = post_document(p);
    if (classify_document(p.post_id, doc, mdd_matcher, threshold_chars).decision != Decision::matched) continue;
    if (classify_document(p.post_id, doc, bd_matcher, threshold_chars).decision == Decision::matched) continue;
    out.insert(p.user_id);
  }
  return out;
}

ComorbidityTable comorbidity_rates(const std::map<std::string, ComorbidityProfile>& profiles,
                                   std::size_t cohort_size, MddPolicy policy) {
  if (cohort_size == 0) throw DataError("comorbidity rates need a non-empty cohort");
  ComorbidityTable t;
  t.cohort_size = cohort_size;
  const std::string mdd_key = policy == MddPolicy::plain ? "MDD" : kConservativeMdd;
  for (const auto& label : kComorbidityLabels) t.counts[label] = 0;
  t.counts[kConservativeMdd] = 0;
  for (const auto& [user, prof] : profiles) {
    bool any = false;
    for (const auto& d : prof.diagnoses) {
      if (d == kCohortLabel) continue;
      if (!t.counts.contains(d)) continue;
      ++t.counts[d];
      if (d == "MDD" || d == kConservativeMdd)
        any |= d == mdd_key;
      else
        any = true;
    }
    if (any) ++t.any_additional_count;
  }
  const auto pct = [&](std::size_t n) { return 100.0 * static_cast<double>(n) / static_cast<double>(cohort_size); };
  for (const auto& label : kComorbidityLabels)
    t.rates.emplace_back(label, pct(t.counts[label == "MDD" ? mdd_key : label]));
  t.any_additional = pct(t.any_additional_count);
  return t;
}

} // namespace srd
