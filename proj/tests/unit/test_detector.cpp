#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "srd/detector.hpp"
#include "srd/error.hpp"

using namespace srd;

namespace {

PatternSet fixture_patterns() {
  PatternSet ps;
  ps.inclusion_patterns = {"As someone with a diagnos*", "my recent CONDITION diagnos*",
                           "I went to a DOCTOR and got diagnos*", "i was diagnos*",
                           "my DOCTOR diagnosed me with CONDITION"};
  ps.exclusion_patterns = {"Not formally diagnos*", "self diagnos*", "she\xE2\x80\x99s diagnos*"};
  ps.condition_terms["BD"] = {"bipolar", "manic depression", "bd-i", "bd-ii", "cyclothymia"};
  ps.condition_terms["MDD"] = {"depression", "mdd"};
  ps.condition_terms["ADHD"] = {"adhd"};
  ps.condition_terms["Psychotic"] = {"schizophrenia"};
  ps.doctor_terms = {"doctor", "pdoc", "shrink"};
  return ps;
}

Post post(std::string id, std::string user, std::string body, std::int64_t t = 1500000000,
          std::optional<std::string> title = std::nullopt) {
  Post p;
  p.post_id = std::move(id);
  p.user_id = std::move(user);
  p.kind = title ? PostKind::submission : PostKind::comment;
  p.title = std::move(title);
  p.body = std::move(body);
  p.subreddit = "s";
  p.created_utc = t;
  return p;
}

// Naive classification: matched iff condition, no exclusion, inclusion and
// some pair closer than the threshold.
bool naive_matched(const Post& p, const PatternSet& ps, const std::string& label, std::size_t threshold) {
  const std::string doc = normalize_text((p.title ? *p.title + " " : std::string(" ")) + strip_quotes(p.body));
  const auto hits = oracle::find(oracle::alternatives(ps, label), doc);
  std::vector<std::pair<std::size_t, std::size_t>> cond, incl;
  for (const auto& [s, e, kind, text] : hits) {
    if (kind == static_cast<int>(SpanKind::exclusion)) return false;
    if (kind == static_cast<int>(SpanKind::condition)) cond.emplace_back(s, e);
    if (kind == static_cast<int>(SpanKind::inclusion)) incl.emplace_back(s, e);
  }
  for (const auto& c : cond)
    for (const auto& i : incl)
      if (oracle::distance(c.first, c.second, i.first, i.second, doc) < threshold) return true;
  return false;
}

} // namespace

TEST_CASE("classify_post examples") {
  const auto m = compile_matcher(fixture_patterns(), "BD");
  auto decide = [&](const std::string& body) { return classify_post(post("p", "u", body), m); };

  const auto recent = decide("My recent bipolar diagnosis changed everything");
  CHECK(recent.decision == Decision::matched);
  CHECK(recent.distance_chars == std::optional<std::size_t>(0));
  REQUIRE(recent.inclusion_span);
  REQUIRE(recent.condition_span);

  const auto formal = decide("Not formally diagnosed with bipolar but I think so");
  CHECK(formal.decision == Decision::excluded_by_pattern);
  CHECK(formal.exclusion_pattern_id == std::optional<std::size_t>(0));

  CHECK(decide("She's diagnosed with bipolar II").decision == Decision::excluded_by_pattern);
  CHECK(decide("> I was diagnosed with bipolar\nhang in there").decision == Decision::no_condition_term);
  CHECK(decide("I was diagnosed with BPD today, thought it was bipolar for years").decision == Decision::matched);
  CHECK(decide("bipolar runs in my family").decision == Decision::no_inclusion);
  CHECK(decide("Nothing to see here").decision == Decision::no_condition_term);
}

TEST_CASE("title and body are matched as one document") {
  const auto m = compile_matcher(fixture_patterns(), "BD");
  const auto e = classify_post(post("p", "u", "with bipolar, finally", 1500000000, "I was diagnosed today"), m);
  CHECK(e.decision == Decision::matched);
}

TEST_CASE("proximity boundary 54 vs 55 characters") {
  const auto m = compile_matcher(fixture_patterns(), "BD");
  for (std::size_t gap : {54u, 55u}) {
    // "i was diagnosed" + gap characters + "bipolar"
    std::string filler(gap, 'x');
    for (std::size_t i = 0; i < gap; i += 5) filler[i] = ' ';
    filler.front() = ' ';
    filler.back() = ' ';
    const auto e = classify_post(post("p", "u", "I was diagnosed" + filler + "bipolar"), m, 55);
    CHECK(e.decision == (gap == 54 ? Decision::matched : Decision::proximity_failed));
  }
}

TEST_CASE("detect_cohort basics") {
  const auto m = compile_matcher(fixture_patterns(), "BD");
  std::vector<Post> one = {post("p1", "u1", "I was diagnosed with bipolar")};
  CHECK(detect_cohort(one, m).size() == 1);
  std::vector<Post> excluded = {post("p1", "u1", "I was self diagnosed with bipolar")};
  CHECK(detect_cohort(excluded, m).empty());

  std::vector<Post> ordered = {post("b", "u1", "I was diagnosed with bipolar", 1500000200),
                               post("a", "u1", "my recent bipolar diagnosis", 1500000100),
                               post("c", "u1", "my recent bd-ii diagnosis", 1500000100)};
  const auto cohort = detect_cohort(ordered, m, 55, 3);
  const auto& ev = cohort.at("u1").evidence;
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].post_id == "a");
  CHECK(ev[1].post_id == "c");
  CHECK(ev[2].post_id == "b");
}

namespace {

std::vector<Post> random_corpus(std::mt19937_64& rng, std::size_t n_posts, std::size_t n_users) {
  static const char* pieces[] = {"i was diagnosed", "with", "bipolar", "adhd", "depression", "self diagnosed",
                                 "my recent bipolar diagnosis", "my doctor diagnosed me with adhd", "today",
                                 "it has been a long road", "not formally diagnosed", "> i was diagnosed with bipolar\n",
                                 "my pdoc diagnosed me with bipolar", "schizophrenia", "and", "\n"};
  std::uniform_int_distribution<std::size_t> n_piece(0, 10), pick(0, std::size(pieces) - 1), user(0, n_users - 1);
  std::uniform_int_distribution<std::int64_t> ts(1400000000, 1600000000);
  std::uniform_int_distribution<int> coin(0, 4);
  std::vector<Post> posts;
  for (std::size_t i = 0; i < n_posts; ++i) {
    std::string body;
    for (std::size_t k = n_piece(rng); k > 0; --k) body += std::string(pieces[pick(rng)]) + " ";
    std::optional<std::string> title;
    if (coin(rng) == 0) title = pieces[pick(rng)];
    posts.push_back(post("p" + std::to_string(i), "u" + std::to_string(user(rng)), body, ts(rng), title));
  }
  return posts;
}

} // namespace

TEST_CASE("detect_cohort equals a naive per-post oracle") {
  std::mt19937_64 rng(17);
  const auto ps = fixture_patterns();
  const auto m = compile_matcher(ps, "BD");
  for (int round = 0; round < 5; ++round) {
    const auto posts = random_corpus(rng, 1000, 50);
    std::map<std::string, std::set<std::string>> naive;
    for (const auto& p : posts)
      if (naive_matched(p, ps, "BD", 55)) naive[p.user_id].insert(p.post_id);
    const auto cohort = detect_cohort(posts, m, 55, 4);
    std::map<std::string, std::set<std::string>> got;
    for (const auto& [uid, e] : cohort)
      for (const auto& ev : e.evidence) got[uid].insert(ev.post_id);
    CHECK(got == naive);
  }
}

TEST_CASE("threshold monotonicity and exclusion dominance") {
  std::mt19937_64 rng(23);
  const auto m = compile_matcher(fixture_patterns(), "BD");
  const auto posts = random_corpus(rng, 600, 40);
  std::size_t prev = 0;
  for (std::size_t t : {1u, 5u, 20u, 55u, 100u, 400u}) {
    const auto c = detect_cohort(posts, m, t);
    CHECK(c.size() >= prev);
    prev = c.size();
  }
  for (const auto& p : posts) {
    Post q = p;
    q.body += " she\xE2\x80\x99s diagnosed";
    const auto before = classify_post(p, m);
    const auto after = classify_post(q, m);
    if (before.decision == Decision::matched) CHECK(after.decision == Decision::excluded_by_pattern);
    CHECK_FALSE((before.decision != Decision::matched && after.decision == Decision::matched));
    CHECK(classify_post(p, m) == before);
  }
}

TEST_CASE("bot candidate flags") {
  std::map<std::string, UserStats> stats;
  stats["u1"] = {"u1", 1501, 0, 0, 0};
  stats["u2"] = {"u2", 1500, 0, 0, 0};
  stats["u3"] = {"u3", 5, 5, 0, 0};
  stats["u4"] = {"u4", 0, 200001, 0, 0};
  stats["u5"] = {"u5", 0, 200000, 0, 0};
  const std::vector<UserAccount> accounts = {{"u3", "AutoModerator", 1400000000}, {"u2", "alice", 1400000000},
                                             {"u6", "RoBOTnik", 1400000000}};
  const auto flags = flag_bot_candidates(stats, accounts);
  const std::set<UserFlag> expected = {{"u1", CohortFlag::high_volume},
                                       {"u3", CohortFlag::bot_name},
                                       {"u4", CohortFlag::high_volume},
                                       {"u6", CohortFlag::bot_name}};
  CHECK(flags == expected);
}

TEST_CASE("apply_exclusions removes psychotic users, confirmed bots and manual removals") {
  Cohort cohort;
  for (int i = 0; i < 10; ++i) {
    const std::string uid = "u" + std::to_string(i);
    cohort[uid] = {uid, {}, {}};
  }
  const std::set<std::string> psychotic = {"u0", "u1"};
  const std::set<UserFlag> flags = {{"u2", CohortFlag::bot_name}, {"u3", CohortFlag::high_volume},
                                    {"u0", CohortFlag::bot_name}};
  const auto review = parse_review_csv("user_id,action,reason\nu2,remove,bot\nu3,keep,human\nu0,remove,bot\n");
  const auto r = apply_exclusions(cohort, psychotic, flags, review);
  CHECK(r.cohort.size() == 7);
  CHECK(r.counts.psychotic == 2);
  CHECK(r.counts.bot == 1);
  CHECK(r.counts.manual == 0);
  CHECK(r.cohort.at("u3").flags.contains(CohortFlag::high_volume));

  const auto manual = apply_exclusions(cohort, {}, {}, parse_review_csv("user_id,action,reason\nu5,remove,x\nzz,remove,y\n"));
  CHECK(manual.counts.manual == 1);
  CHECK(manual.cohort.size() == 9);
  CHECK(manual.warnings.size() == 1);

  const auto none = apply_exclusions(cohort, {}, flags, {});
  CHECK(none.cohort.size() == 10);

  CHECK_THROWS_AS(parse_review_csv("user_id,action,reason\nu1,delete,x\n"), ParseError);
}

TEST_CASE("comorbidity extraction and conservative MDD") {
  const auto ps = fixture_patterns();
  MatcherSet matchers;
  for (const auto& label : {"BD", "MDD", "ADHD", "Psychotic"}) matchers.emplace(label, compile_matcher(ps, label));
  const std::vector<Post> posts = {
      post("a1", "a", "I was diagnosed with bipolar"),
      post("a2", "a", "my doctor diagnosed me with ADHD last year"),
      post("b1", "b", "I was diagnosed with bipolar and depression"),       // MDD and BD in one post
      post("c1", "c", "I was diagnosed with bipolar"),
      post("c2", "c", "I was diagnosed with depression years ago"),        // MDD only
      post("d1", "d", "I was diagnosed with bipolar"),
  };
  const std::set<std::string> users = {"a", "b", "c", "d"};
  const auto profiles = extract_comorbidities(posts, users, matchers, 55, 2);
  CHECK(profiles.at("a").diagnoses == std::set<std::string>{"BD", "ADHD"});
  CHECK(profiles.at("b").diagnoses == std::set<std::string>{"BD", "MDD"});
  CHECK(profiles.at("c").diagnoses == std::set<std::string>{"BD", "MDD", "MDD_conservative"});
  CHECK(profiles.at("d").diagnoses == std::set<std::string>{"BD"});

  const auto cons = conservative_mdd(posts, users, matchers.at("MDD"), matchers.at("BD"));
  CHECK(cons == std::set<std::string>{"c"});

  const auto plain = comorbidity_rates(profiles, 4, MddPolicy::plain);
  const auto strict = comorbidity_rates(profiles, 4, MddPolicy::conservative);
  CHECK(plain.counts.at("MDD") == 2);
  CHECK(strict.counts.at("MDD_conservative") == 1);
  CHECK(plain.any_additional_count == 3);
  CHECK(strict.any_additional_count == 2);
}

TEST_CASE("conservative MDD users are a subset of plain MDD users") {
  std::mt19937_64 rng(31);
  const auto ps = fixture_patterns();
  MatcherSet matchers;
  for (const auto& label : {"BD", "MDD", "ADHD", "Psychotic"}) matchers.emplace(label, compile_matcher(ps, label));
  const auto posts = random_corpus(rng, 800, 30);
  std::set<std::string> users;
  for (const auto& p : posts) users.insert(p.user_id);
  const auto profiles = extract_comorbidities(posts, users, matchers);
  for (const auto& [uid, p] : profiles) {
    CHECK(p.diagnoses.contains("BD"));
    if (p.diagnoses.contains("MDD_conservative")) CHECK(p.diagnoses.contains("MDD"));
  }
}

TEST_CASE("comorbidity rates") {
  std::map<std::string, ComorbidityProfile> p;
  p["a"] = {"a", {"BD", "ADHD"}};
  p["b"] = {"b", {"BD", "ADHD"}};
  p["c"] = {"c", {"BD"}};
  p["d"] = {"d", {"BD"}};
  const auto t = comorbidity_rates(p, 4);
  double adhd = -1;
  for (const auto& [label, rate] : t.rates)
    if (label == "ADHD") adhd = rate;
  CHECK(adhd == doctest::Approx(50.0));
  CHECK(t.any_additional == doctest::Approx(50.0));

  std::map<std::string, ComorbidityProfile> bd_only;
  bd_only["a"] = {"a", {"BD"}};
  CHECK(comorbidity_rates(bd_only, 1).any_additional == 0.0);
  CHECK_THROWS_AS(comorbidity_rates({}, 0), DataError);
}
