#include "srd/report.hpp"

#include <algorithm>
#include <cstdio>

#include "srd/error.hpp"
#include "srd/io.hpp"
#include "srd/text.hpp"

namespace srd {

using nlohmann::json;

json cohort_record_to_json(const CohortRecord& r) {
  json j;
  j["user_id"] = r.user_id;
  j["flags"] = r.flags;
  j["diagnoses"] = r.diagnoses;
  j["evidence"] = r.evidence_post_ids;
  j["n_posts"] = r.n_posts;
  return j;
}

CohortRecord cohort_record_from_json(const json& j) {
  try {
    CohortRecord r;
    r.user_id = j.at("user_id").get<std::string>();
    r.flags = j.at("flags").get<std::set<std::string>>();
    r.diagnoses = j.at("diagnoses").get<std::set<std::string>>();
    r.evidence_post_ids = j.at("evidence").get<std::vector<std::string>>();
    r.n_posts = j.at("n_posts").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed cohort record: ") + e.what());
  }
}

std::string detect_summary_tsv(const DetectSummary& s) {
  std::string out = tsv_row({"metric", "value"});
  auto row = [&](const char* k, std::size_t v) { out += tsv_row({k, std::to_string(v)}); };
  row("n_posts", s.n_posts);
  row("n_detected", s.n_detected);
  row("removed_psychotic", s.removed_psychotic);
  row("removed_bot", s.removed_bot);
  row("removed_manual", s.removed_manual);
  row("n_cohort", s.n_cohort);
  row("n_cohort_posts", s.n_cohort_posts);
  return out;
}

DetectSummary parse_detect_summary(std::string_view tsv) {
  DetectSummary s;
  const std::map<std::string_view, std::size_t DetectSummary::*> fields = {
      {"n_posts", &DetectSummary::n_posts},
      {"n_detected", &DetectSummary::n_detected},
      {"removed_psychotic", &DetectSummary::removed_psychotic},
      {"removed_bot", &DetectSummary::removed_bot},
      {"removed_manual", &DetectSummary::removed_manual},
      {"n_cohort", &DetectSummary::n_cohort},
      {"n_cohort_posts", &DetectSummary::n_cohort_posts}};
  std::size_t pos = 0;
  while (pos < tsv.size()) {
    auto nl = tsv.find('\n', pos);
    if (nl == std::string_view::npos) nl = tsv.size();
    const auto line = tsv.substr(pos, nl - pos);
    pos = nl + 1;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) continue;
    auto it = fields.find(line.substr(0, tab));
    if (it == fields.end()) continue;
    s.*(it->second) = static_cast<std::size_t>(std::stoull(std::string(trim(line.substr(tab + 1)))));
  }
  return s;
}

std::vector<std::string> distribution_percents(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  std::vector<std::string> out(counts.size(), "0.0");
  if (total == 0) return out;
  std::vector<std::size_t> tenths(counts.size());
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::size_t scaled = counts[i] * 1000;
    tenths[i] = scaled / total;
    assigned += tenths[i];
    remainders.emplace_back(scaled % total, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < 1000 && k < remainders.size(); ++k, ++assigned) ++tenths[remainders[k].second];
  for (std::size_t i = 0; i < counts.size(); ++i)
    out[i] = std::to_string(tenths[i] / 10) + "." + std::to_string(tenths[i] % 10);
  return out;
}

namespace {

Distribution make_distribution(const std::vector<std::pair<std::string, std::size_t>>& counts) {
  Distribution d;
  std::vector<std::size_t> ns;
  for (const auto& [k, n] : counts) {
    ns.push_back(n);
    d.denominator += n;
  }
  const auto pct = distribution_percents(ns);
  for (std::size_t i = 0; i < counts.size(); ++i) d.rows.push_back({counts[i].first, counts[i].second, pct[i]});
  return d;
}

} // namespace

ReportBundle build_report(const std::vector<CohortRecord>& cohort, const std::vector<UserProfile>& profiles,
                          const DetectSummary& detect, MddPolicy policy, std::size_t top_n) {
  ReportBundle b;
  b.detect = detect;
  b.mdd_policy = policy;
  b.cohort_size = cohort.size();

  std::map<std::string, ComorbidityProfile> comorb;
  for (const auto& r : cohort) comorb[r.user_id] = {r.user_id, r.diagnoses};
  if (!cohort.empty()) {
    const auto table = comorbidity_rates(comorb, cohort.size(), policy);
    const std::string mdd_key = policy == MddPolicy::plain ? "MDD" : kConservativeMdd;
    for (const auto& label : kComorbidityLabels)
      b.comorbidity_counts.emplace_back(label, table.counts.at(label == "MDD" ? mdd_key : label));
    b.any_additional = table.any_additional_count;
  } else {
    for (const auto& label : kComorbidityLabels) b.comorbidity_counts.emplace_back(label, 0);
  }

  std::set<std::string> members;
  for (const auto& r : cohort) members.insert(r.user_id);
  std::map<ReportAgeGroup, std::size_t> first, mean;
  std::map<std::string, std::size_t> gender, country;
  double first_sum = 0.0;
  std::size_t first_n = 0;
  for (const auto& p : profiles) {
    if (!members.contains(p.user_id)) continue;
    if (p.age_group_first_post) ++first[*p.age_group_first_post];
    if (p.age_group_mean) ++mean[*p.age_group_mean];
    if (p.first_post_age) {
      first_sum += *p.first_post_age;
      ++first_n;
    }
    if (p.gender) ++gender[std::string(to_string(*p.gender))];
    if (p.country) ++country[*p.country];
  }
  std::vector<std::pair<std::string, std::size_t>> fc, mc;
  for (auto g : kReportAgeGroups) {
    fc.emplace_back(std::string(to_string(g)), first[g]);
    mc.emplace_back(std::string(to_string(g)), mean[g]);
  }
  b.age_first_post = make_distribution(fc);
  b.age_mean = make_distribution(mc);
  b.gender = make_distribution({{"f", gender["f"]}, {"m", gender["m"]}});

  std::vector<std::pair<std::string, std::size_t>> ranked(country.begin(), country.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& c) { return a.second > c.second; });
  std::vector<std::pair<std::string, std::size_t>> top;
  std::size_t other = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < top_n)
      top.push_back(ranked[i]);
    else
      other += ranked[i].second;
  }
  if (other > 0) top.emplace_back("other", other);
  b.countries = make_distribution(top);
  if (first_n > 0) b.mean_first_post_age = first_sum / static_cast<double>(first_n);
  return b;
}

Baseline parse_baseline(std::string_view tsv) {
  Baseline b;
  std::size_t pos = 0;
  bool header = true;
  std::size_t line_no = 0;
  while (pos < tsv.size()) {
    auto nl = tsv.find('\n', pos);
    if (nl == std::string_view::npos) nl = tsv.size();
    auto line = tsv.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t p = 0;
    while (true) {
      auto tab = line.find('\t', p);
      fields.emplace_back(trim(line.substr(p, tab == std::string_view::npos ? std::string_view::npos : tab - p)));
      if (tab == std::string_view::npos) break;
      p = tab + 1;
    }
    if (header) {
      if (fields.size() < 2) throw ParseError(line_no, "baseline needs a key column and at least one value column");
      b.columns.assign(fields.begin() + 1, fields.end());
      header = false;
      continue;
    }
    fields.resize(b.columns.size() + 1);
    b.rows[fields[0]] = std::vector<std::string>(fields.begin() + 1, fields.end());
  }
  return b;
}

namespace {

void add_baseline_header(std::vector<std::string>& header, const Baseline* base) {
  if (base)
    for (const auto& c : base->columns) header.push_back(c);
}

void add_baseline_values(std::vector<std::string>& row, const std::string& key, const Baseline* base) {
  if (!base) return;
  auto it = base->rows.find(key);
  for (std::size_t i = 0; i < base->columns.size(); ++i)
    row.push_back(it == base->rows.end() ? "N/A" : it->second[i]);
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pct_of(std::size_t n, std::size_t d) {
  return d == 0 ? "0.0" : format_pct(100.0 * static_cast<double>(n) / static_cast<double>(d));
}

} // namespace

std::map<std::string, std::string> render_report(const ReportBundle& b, const std::map<std::string, Baseline>& baselines) {
  auto base = [&](const char* name) -> const Baseline* {
    auto it = baselines.find(name);
    return it == baselines.end() ? nullptr : &it->second;
  };
  std::map<std::string, std::string> files;

  {
    const Baseline* bl = base("comorbidity");
    std::vector<std::string> header{"diagnosis", "n", "denominator", "percent"};
    add_baseline_header(header, bl);
    std::string out = tsv_row(header);
    for (const auto& [label, n] : b.comorbidity_counts) {
      std::vector<std::string> row{label, std::to_string(n), std::to_string(b.cohort_size), pct_of(n, b.cohort_size)};
      add_baseline_values(row, label, bl);
      out += tsv_row(row);
    }
    files["comorbidity.tsv"] = out;
  }
  {
    const Baseline* bl = base("age_groups");
    std::vector<std::string> header{"series", "group", "n", "denominator", "percent"};
    add_baseline_header(header, bl);
    std::string out = tsv_row(header);
    for (const auto& [series, dist] : {std::pair<const char*, const Distribution*>{"first_post_age", &b.age_first_post},
                                       {"mean_posting_age", &b.age_mean}})
      for (const auto& r : dist->rows) {
        std::vector<std::string> row{series, r.key, std::to_string(r.n), std::to_string(dist->denominator), r.percent};
        add_baseline_values(row, r.key, bl);
        out += tsv_row(row);
      }
    files["age_groups.tsv"] = out;
  }
  auto simple = [&](const char* name, const char* key_name, const Distribution& dist, bool ranked) {
    const Baseline* bl = base(name);
    std::vector<std::string> header;
    if (ranked) header.push_back("rank");
    for (const char* h : {key_name, "n", "denominator", "percent"}) header.push_back(h);
    add_baseline_header(header, bl);
    std::string out = tsv_row(header);
    std::size_t rank = 0;
    for (const auto& r : dist.rows) {
      std::vector<std::string> row;
      if (ranked) row.push_back(r.key == "other" ? "-" : std::to_string(++rank));
      for (const auto& v : {r.key, std::to_string(r.n), std::to_string(dist.denominator), r.percent}) row.push_back(v);
      add_baseline_values(row, r.key, bl);
      out += tsv_row(row);
    }
    files[std::string(name) + ".tsv"] = out;
  };
  simple("gender", "gender", b.gender, false);
  simple("countries", "country", b.countries, true);

  {
    std::string out = tsv_row({"metric", "value"});
    auto row = [&](const char* k, const std::string& v) { out += tsv_row({k, v}); };
    row("n_users", std::to_string(b.cohort_size));
    row("n_posts", std::to_string(b.detect.n_cohort_posts));
    row("n_detected", std::to_string(b.detect.n_detected));
    row("removed_psychotic", std::to_string(b.detect.removed_psychotic));
    row("removed_bot", std::to_string(b.detect.removed_bot));
    row("removed_manual", std::to_string(b.detect.removed_manual));
    row("mdd_policy", b.mdd_policy == MddPolicy::plain ? "plain" : "conservative");
    row("n_any_additional", std::to_string(b.any_additional));
    row("pct_any_additional", pct_of(b.any_additional, b.cohort_size));
    row("mean_first_post_age", b.mean_first_post_age ? fixed(*b.mean_first_post_age, 1) : "n/a");
    row("n_age_assigned_first_post", std::to_string(b.age_first_post.denominator));
    row("n_age_assigned_mean", std::to_string(b.age_mean.denominator));
    row("n_gender_assigned", std::to_string(b.gender.denominator));
    row("n_country_assigned", std::to_string(b.countries.denominator));
    files["summary.tsv"] = out;
  }
  return files;
}

} // namespace srd
