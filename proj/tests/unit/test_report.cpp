#include <doctest.h>

#include <random>

#include "srd/error.hpp"
#include "srd/report.hpp"

using namespace srd;

namespace {

// tenths of a percent as an integer, from "12.3"
long tenths(const std::string& pct) {
  const auto dot = pct.find('.');
  return std::stol(pct.substr(0, dot)) * 10 + std::stol(pct.substr(dot + 1));
}

std::vector<std::vector<std::string>> rows_of(const std::string& tsv) {
  std::vector<std::vector<std::string>> out;
  std::size_t pos = 0;
  while (pos < tsv.size()) {
    auto nl = tsv.find('\n', pos);
    std::string line = tsv.substr(pos, nl - pos);
    pos = nl + 1;
    std::vector<std::string> f;
    std::size_t p = 0;
    while (true) {
      auto tab = line.find('\t', p);
      f.push_back(line.substr(p, tab == std::string::npos ? std::string::npos : tab - p));
      if (tab == std::string::npos) break;
      p = tab + 1;
    }
    out.push_back(f);
  }
  return out;
}

UserProfile profile(const std::string& id, double first_age, std::optional<Gender> g, std::optional<std::string> c) {
  UserProfile p;
  p.user_id = id;
  p.first_post_age = first_age;
  p.mean_posting_age = first_age + 1.0;
  p.age_group_first_post = bucket_age(first_age);
  p.age_group_mean = bucket_age(first_age + 1.0);
  p.gender = g;
  p.country = std::move(c);
  return p;
}

} // namespace

TEST_CASE("largest remainder percentages") {
  CHECK(distribution_percents({1, 1, 1}) == std::vector<std::string>{"33.4", "33.3", "33.3"});
  CHECK(distribution_percents({1, 2}) == std::vector<std::string>{"33.3", "66.7"});
  CHECK(distribution_percents({0, 0}) == std::vector<std::string>{"0.0", "0.0"});
  CHECK(distribution_percents({5}) == std::vector<std::string>{"100.0"});
  CHECK(distribution_percents({}).empty());
}

TEST_CASE("distribution percentages sum to 100.0 and stay within a tenth of the exact share") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_int_distribution<std::size_t> count(0, 5000);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::size_t> counts(size(rng));
    std::size_t total = 0;
    for (auto& c : counts) total += (c = count(rng));
    if (total == 0) continue;
    const auto pct = distribution_percents(counts);
    long sum = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const long t = tenths(pct[k]);
      sum += t;
      const double exact = 1000.0 * static_cast<double>(counts[k]) / static_cast<double>(total);
      CHECK(static_cast<double>(t) >= std::floor(exact) - 1e-9);
      CHECK(static_cast<double>(t) <= std::floor(exact) + 1.0 + 1e-9);
    }
    CHECK(sum == 1000);
  }
}

TEST_CASE("cohort records round-trip") {
  CohortRecord r{"u1", {"bot_name"}, {"BD", "MDD"}, {"p1", "p2"}, 7};
  const auto back = cohort_record_from_json(cohort_record_to_json(r));
  CHECK(back.user_id == "u1");
  CHECK(back.flags == r.flags);
  CHECK(back.diagnoses == r.diagnoses);
  CHECK(back.evidence_post_ids == r.evidence_post_ids);
  CHECK(back.n_posts == 7);
  CHECK_THROWS_AS(cohort_record_from_json(nlohmann::json::parse(R"({"user_id":"u"})")), DataError);
}

TEST_CASE("detect summary round-trip") {
  DetectSummary s{100, 20, 1, 2, 3, 14, 50};
  const auto back = parse_detect_summary(detect_summary_tsv(s));
  CHECK(detect_summary_tsv(back) == detect_summary_tsv(s));
}

TEST_CASE("report bundle counts cohort members only") {
  std::vector<CohortRecord> cohort = {
      {"a", {}, {"BD", "MDD", "MDD_conservative"}, {}, 3},
      {"b", {}, {"BD", "MDD", "Anxiety"}, {}, 2},
      {"c", {}, {"BD"}, {}, 1},
      {"d", {}, {"BD"}, {}, 1},
  };
  std::vector<UserProfile> profiles = {
      profile("a", 15.0, Gender::f, "US"), profile("b", 25.0, Gender::f, "US"),
      profile("c", 40.0, Gender::m, "GB"), profile("d", 70.0, std::nullopt, "DE"),
      profile("outsider", 20.0, Gender::m, "FR"),
  };
  DetectSummary det{1000, 5, 1, 0, 0, 4, 7};

  const auto plain = build_report(cohort, profiles, det, MddPolicy::plain, 2);
  CHECK(plain.cohort_size == 4);
  CHECK(plain.comorbidity_counts.front() == std::pair<std::string, std::size_t>{"MDD", 2});
  CHECK(plain.any_additional == 2);
  CHECK(plain.gender.denominator == 3);
  CHECK(plain.gender.rows[0].key == "f");
  CHECK(plain.gender.rows[0].percent == "66.7");
  CHECK(plain.age_first_post.denominator == 4);
  CHECK(*plain.mean_first_post_age == doctest::Approx(37.5));
  REQUIRE(plain.countries.rows.size() == 3);
  CHECK(plain.countries.rows[0].key == "US");
  CHECK(plain.countries.rows[1].key == "DE");  // ties keep alphabetical order
  CHECK(plain.countries.rows[2].key == "other");
  CHECK(plain.countries.rows[2].n == 1);

  const auto cons = build_report(cohort, profiles, det, MddPolicy::conservative, 5);
  CHECK(cons.comorbidity_counts.front() == std::pair<std::string, std::size_t>{"MDD", 1});
  CHECK(cons.countries.rows.size() == 3);  // nothing left for "other"

  const auto files = render_report(plain, {});
  CHECK(files.size() == 5);
  const auto comorb = rows_of(files.at("comorbidity.tsv"));
  CHECK(comorb[0] == std::vector<std::string>{"diagnosis", "n", "denominator", "percent"});
  CHECK(comorb[1] == std::vector<std::string>{"MDD", "2", "4", "50.0"});
  const auto ages = rows_of(files.at("age_groups.tsv"));
  CHECK(ages.size() == 11);
  CHECK(ages[1] == std::vector<std::string>{"first_post_age", "13-17", "1", "4", "25.0"});
  const auto countries = rows_of(files.at("countries.tsv"));
  CHECK(countries[3][0] == "-");
  const auto summary = files.at("summary.tsv");
  CHECK(summary.find("mean_first_post_age\t37.5\n") != std::string::npos);
  CHECK(summary.find("mdd_policy\tplain\n") != std::string::npos);
}

TEST_CASE("empty cohort renders zero rows without dividing by zero") {
  const auto b = build_report({}, {}, DetectSummary{}, MddPolicy::plain, 5);
  const auto files = render_report(b, {});
  const auto comorb = rows_of(files.at("comorbidity.tsv"));
  CHECK(comorb[1][3] == "0.0");
  CHECK(files.at("summary.tsv").find("mean_first_post_age\tn/a") != std::string::npos);
}

TEST_CASE("baselines join by key and mark missing keys") {
  const auto base = parse_baseline("gender\tprior_pct\tprior_n\nf\t61.0\t305\n");
  CHECK(base.columns == std::vector<std::string>{"prior_pct", "prior_n"});
  std::vector<CohortRecord> cohort = {{"a", {}, {"BD"}, {}, 1}, {"b", {}, {"BD"}, {}, 1}};
  std::vector<UserProfile> profiles = {profile("a", 20, Gender::f, std::nullopt),
                                       profile("b", 20, Gender::m, std::nullopt)};
  const auto files = render_report(build_report(cohort, profiles, {}, MddPolicy::plain, 5), {{"gender", base}});
  const auto rows = rows_of(files.at("gender.tsv"));
  CHECK(rows[0] == std::vector<std::string>{"gender", "n", "denominator", "percent", "prior_pct", "prior_n"});
  CHECK(rows[1] == std::vector<std::string>{"f", "1", "2", "50.0", "61.0", "305"});
  CHECK(rows[2] == std::vector<std::string>{"m", "1", "2", "50.0", "N/A", "N/A"});
  CHECK_THROWS_AS(parse_baseline("only\n"), ParseError);
}
