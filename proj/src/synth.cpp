#include "srd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "srd/error.hpp"
#include "srd/io.hpp"

namespace srd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::int64_t kYear = 31557600;
constexpr std::int64_t kDay = 86400;
constexpr std::int64_t kEpochStart = 1356998400;  // 2013-01-01

const char* const kFiller[] = {
    "went for a long walk by the river today",
    "anyone else love rainy mornings",
    "finally finished the book I was reading",
    "my cat knocked over a plant again",
    "trying a new pasta recipe tonight",
    "the weather has been strange this week",
    "looking for podcast recommendations",
    "started learning guitar last month",
    "work was busy but manageable",
    "planning a small trip with friends",
    "does anyone have tips for sleeping better",
    "the new season of that show is great",
    "spent the afternoon cleaning the garage",
    "bought a secondhand bike and it rides well",
    "thinking about repainting the kitchen",
};
const char* const kTitles[] = {"quick question", "weekend plans", "small win today", "random thought",
                               "need some advice", "checking in"};
const char* const kSubreddits[] = {"bipolar", "AskReddit", "books", "cooking", "running", "gaming", "music"};
const char* const kNameWords[] = {"river", "maple", "quiet", "sunny", "blue",  "cedar", "fox",
                                  "lark",  "moss",  "pine",  "wren",  "amber", "coral", "delta",
                                  "ember", "fern",  "gale",  "haze",  "iris",  "juniper"};
const char* const kBdTerms[] = {"bipolar", "bipolar ii", "bipolar disorder", "bd-ii", "cyclothymia", "bipolar 1"};
const char* const kBdTemplates[] = {
    "I was diagnosed with {} last year and things are better now.",
    "As someone with a diagnosis of {}, mornings are hard for me.",
    "My pdoc diagnosed me with {} in the spring.",
    "I've been diagnosed with {} for a few years now.",
    "I went to a doctor and got diagnosed with {} after a rough winter.",
    "Still processing my recent {} diagnosis, it feels unreal.",
};
const char* const kComorbidTemplates[] = {
    "I was diagnosed with {} when I was younger.",
    "My therapist diagnosed me with {} recently.",
};
const std::map<std::string, std::string> kComorbidTerm = {
    {"MDD", "major depression"}, {"Anxiety", "generalized anxiety"}, {"ADHD", "adhd"}, {"BPD", "bpd"},
    {"PTSD", "ptsd"},            {"OCD", "ocd"},                     {"ASD", "autism"}, {"ED", "anorexia"}};
const std::vector<std::pair<std::string, double>> kComorbidRates = {
    {"MDD", 0.4}, {"Anxiety", 0.35}, {"ADHD", 0.5}, {"BPD", 0.15},
    {"PTSD", 0.15}, {"OCD", 0.1},    {"ASD", 0.08}, {"ED", 0.1}};
// Posts that mention bipolar without counting as a self-report.
const char* const kNearMisses[] = {
    "I was self diagnosed with bipolar but never saw anyone.",
    "My mom was diagnosed with bipolar when I was a kid.",
    "I think I might have bipolar, does anyone else relate?",
    "I am not formally diagnosed with bipolar yet.",
    "I was diagnosed in the end, after many long appointments and a great deal of waiting around, with bipolar.",
};
const char* const kQuotedNearMiss = "> I was diagnosed with bipolar last year\nThanks for sharing this, it helps.";

std::string fill(std::string_view tmpl, std::string_view term) {
  std::string out(tmpl);
  const auto at = out.find("{}");
  out.replace(at, 2, term);
  return out;
}

// Report age buckets, lower bounds 13, 18, 30, 50, 65.
ReportAgeGroup age_bucket(double age) {
  if (age < 18.0) return ReportAgeGroup::g13_17;
  if (age < 30.0) return ReportAgeGroup::g18_29;
  if (age < 50.0) return ReportAgeGroup::g30_49;
  if (age < 65.0) return ReportAgeGroup::g50_64;
  return ReportAgeGroup::g65_plus;
}

const std::pair<double, double> kAgeRanges[] = {{13, 18}, {18, 30}, {30, 50}, {50, 65}, {65, 90}};

struct HamPlan {
  const char* label;
  double midpoint;
};
const HamPlan kHam[] = {{"<14", 13.5}, {"14-23", 18.5}, {"24-45", 34.5}, {"46-65", 55.5}, {"66+", 78.0}};

enum class Role { cohort, near_miss, control, psychotic, psychotic_bot, bot_name, bot_volume, bot_kept, manual };
enum class AgePlan { self, language, unresolved, discarded, none };
enum class GenderPlan { username, self, language, none };

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  bool chance(double p) { return real(0.0, 1.0) < p; }
  template <class T, std::size_t N>
  const T& pick(const T (&arr)[N]) {
    return arr[static_cast<std::size_t>(range(0, N - 1))];
  }
  template <class V>
  void shuffle(V& v) {
    std::shuffle(v.begin(), v.end(), eng_);
  }

 private:
  std::mt19937_64 eng_;
};

// One post before timestamps are assigned.
struct PlannedPost {
  bool submission = false;
  std::string title;
  std::string body;
  // Self-report title to render once the time is known.
  std::optional<Gender> title_gender;
  std::optional<int> title_age;  // fixed age instead of the true age
  bool title_first_person = true;
  bool noise_title = false;
};

std::string gender_letter(Gender g, bool upper) {
  if (g == Gender::f) return upper ? "F" : "f";
  return upper ? "M" : "m";
}

std::string self_title(Rng& rng, int age, Gender g, bool first_person) {
  const std::string a = std::to_string(age);
  const bool up = rng.chance(0.5);
  const std::string l = gender_letter(g, up);
  std::string token;
  switch (rng.range(0, 3)) {
    case 0: token = "[" + a + l + "]"; break;
    case 1: token = "(" + a + " " + l + ")"; break;
    case 2: token = "[" + l + a + "]"; break;
    default: token = "[" + a + "/" + l + "]"; break;
  }
  if (!first_person) return token + " " + rng.pick(kTitles);
  switch (rng.range(0, 2)) {
    case 0: return "I'm " + token + " and " + rng.pick(kTitles);
    case 1: return "Me " + token + " " + rng.pick(kTitles);
    default: return "My " + token + " " + rng.pick(kTitles);
  }
}

std::string ham_json(const std::string& uid, const char* label, double score) {
  return json{{"user_id", uid}, {"attribute", "age_group"}, {"value", label}, {"score", score}, {"model_id", "ham-cnn"}}
      .dump();
}
std::string gender_json(const std::string& uid, double value, bool username_model, double score) {
  return json{{"user_id", uid},
              {"attribute", "gender"},
              {"value", value},
              {"score", score},
              {"model_id", username_model ? "username-lstm" : "ham-gender"}}
      .dump();
}
std::string location_json(const std::string& uid, double lat, double lon, double score) {
  return json{{"user_id", uid}, {"attribute", "location"}, {"value", {lat, lon}}, {"score", score}, {"model_id", "smgeo"}}
      .dump();
}

std::string pad(std::size_t n, int width) {
  std::string s = std::to_string(n);
  return std::string(width > static_cast<int>(s.size()) ? width - s.size() : 0, '0') + s;
}

} // namespace

std::vector<GridCell> read_grid_cells(const fs::path& csv) {
  const auto rows = parse_csv(read_file(csv));
  std::vector<GridCell> cells;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() < 3) continue;
    cells.push_back({std::stod(rows[i][0]), std::stod(rows[i][1]), rows[i][2]});
  }
  return cells;
}

SynthCorpus generate_synth(const SynthOptions& options, const std::vector<GridCell>& cells) {
  if (options.n_users < 100) throw ConfigError("synthetic corpus needs at least 100 users");
  if (cells.empty()) throw ConfigError("synthetic corpus needs country grid cells");
  Rng rng(options.seed);
  SynthCorpus out;

  std::vector<Role> roles = {Role::psychotic, Role::psychotic, Role::psychotic, Role::psychotic,
                             Role::psychotic_bot, Role::bot_name, Role::bot_volume, Role::bot_kept,
                             Role::bot_kept, Role::manual};
  const std::size_t n_near = options.n_users * 12 / 100;
  const std::size_t n_control = options.n_users * 18 / 100;
  roles.insert(roles.end(), n_near, Role::near_miss);
  roles.insert(roles.end(), n_control, Role::control);
  roles.resize(options.n_users, Role::cohort);
  rng.shuffle(roles);

  std::vector<std::string> predictions, review_rows;
  std::size_t next_post = 0;
  std::size_t bot_kept_seen = 0;

  for (std::size_t u = 0; u < roles.size(); ++u) {
    const Role role = roles[u];
    SynthTruth t;
    t.user_id = "usr_" + pad(u + 1, 5);
    t.username = std::string(rng.pick(kNameWords)) + "_" + rng.pick(kNameWords) + "_" + std::to_string(u + 1);
    switch (role) {
      case Role::psychotic_bot: t.username = "autopilot_" + std::to_string(u + 1); break;
      case Role::bot_name: t.username = "autoposter_" + std::to_string(u + 1); break;
      case Role::bot_kept: t.username = "robot_fan_" + std::to_string(u + 1); break;
      default: break;
    }

    std::vector<PlannedPost> plan;
    auto add_body = [&](std::string body, bool may_be_submission = true) {
      PlannedPost p;
      p.submission = may_be_submission && rng.chance(0.4);
      if (p.submission) p.title = rng.pick(kTitles);
      p.body = std::move(body);
      plan.push_back(std::move(p));
    };

    const bool detected = role != Role::near_miss && role != Role::control;
    t.detected = detected;
    bool mdd_combined = false;
    if (detected) {
      t.diagnoses.insert("BD");
      // MDD appears either in its own post, inside the BD post, or both.
      const int mdd_mode = rng.chance(0.4) ? static_cast<int>(rng.range(0, 2)) : -1;
      mdd_combined = mdd_mode == 1 || mdd_mode == 2;
      if (mdd_combined) {
        add_body("I was diagnosed with bipolar after years of being treated for major depression.");
        t.diagnoses.insert("MDD");
      } else {
        add_body(fill(rng.pick(kBdTemplates), rng.pick(kBdTerms)));
      }
      if (rng.chance(0.2)) add_body(fill(rng.pick(kBdTemplates), rng.pick(kBdTerms)));
      if (mdd_mode == 0 || mdd_mode == 2) {
        add_body(fill(rng.pick(kComorbidTemplates), kComorbidTerm.at("MDD")));
        t.diagnoses.insert("MDD");
        t.diagnoses.insert("MDD_conservative");
      }
      for (const auto& [label, rate] : kComorbidRates) {
        if (label == "MDD" || !rng.chance(rate)) continue;
        add_body(fill(rng.pick(kComorbidTemplates), kComorbidTerm.at(label)));
        t.diagnoses.insert(label);
      }
      if (role == Role::psychotic || role == Role::psychotic_bot) {
        add_body("I was diagnosed with schizoaffective disorder two years ago.");
        t.diagnoses.insert("Psychotic");
      }
    } else if (role == Role::near_miss) {
      if (rng.chance(0.2))
        add_body(kQuotedNearMiss, false);
      else
        add_body(rng.pick(kNearMisses));
    } else if (rng.chance(0.3)) {
      add_body(fill(rng.pick(kComorbidTemplates), kComorbidTerm.at("ADHD")));
    }

    switch (role) {
      case Role::psychotic:
      case Role::psychotic_bot: t.removal = "psychotic"; break;
      case Role::bot_name:
      case Role::bot_volume: t.removal = "bot"; break;
      case Role::manual: t.removal = "manual"; break;
      default: break;
    }
    t.in_cohort = detected && t.removal.empty();
    if (role == Role::psychotic_bot || role == Role::bot_name || role == Role::bot_volume)
      review_rows.push_back(t.user_id + ",remove,automated account");
    if (role == Role::manual) review_rows.push_back(t.user_id + ",remove,joke account");
    if (role == Role::bot_kept) {
      t.flags.insert("bot_name");
      if (bot_kept_seen++ == 0) review_rows.push_back(t.user_id + ",keep,human");
    }

    // Demographic plans, cohort members only.
    GenderPlan gplan = GenderPlan::none;
    AgePlan aplan = AgePlan::none;
    Gender gvalue = Gender::f;
    int ham_index = -1;
    double first_age = 0.0;
    if (t.in_cohort) {
      const double r = rng.real(0.0, 1.0);
      gplan = r < 0.3 ? GenderPlan::username : r < 0.6 ? GenderPlan::self : r < 0.85 ? GenderPlan::language
                                                                                       : GenderPlan::none;
      gvalue = rng.chance(0.5) ? Gender::f : Gender::m;
      const double a = rng.real(0.0, 1.0);
      if (gplan == GenderPlan::self)
        aplan = a < 0.7 ? AgePlan::self : AgePlan::unresolved;
      else
        aplan = a < 0.4    ? AgePlan::self
                : a < 0.7  ? AgePlan::language
                : a < 0.8  ? AgePlan::unresolved
                : a < 0.88 ? AgePlan::discarded
                           : AgePlan::none;
      if (aplan == AgePlan::self) {
        const auto [lo, hi] = kAgeRanges[rng.range(0, 4)];
        first_age = rng.real(lo + 1.5, hi - 2.0);
      }
      if (aplan == AgePlan::language || aplan == AgePlan::unresolved) ham_index = static_cast<int>(rng.range(0, 4));
      if (aplan == AgePlan::discarded) ham_index = 0;

      // Self-report titles.
      const bool titles = aplan == AgePlan::self || aplan == AgePlan::unresolved;
      if (titles) {
        const bool first_person = rng.chance(0.7);
        std::vector<Gender> genders;
        if (gplan == GenderPlan::self) {
          genders = {gvalue};
          if (rng.chance(0.5)) genders.push_back(gvalue);
        } else if (gplan == GenderPlan::username) {
          genders = {rng.chance(0.5) ? Gender::f : Gender::m};
        } else {
          genders = {Gender::f, Gender::m};  // tie: no self-reported gender
        }
        if (aplan == AgePlan::unresolved && genders.size() < 2) genders.push_back(genders.front());
        for (std::size_t i = 0; i < genders.size(); ++i) {
          PlannedPost p;
          p.submission = true;
          p.body = rng.pick(kFiller);
          p.title_gender = genders[i];
          p.title_first_person = first_person;
          if (aplan == AgePlan::unresolved) p.title_age = i == 0 ? 20 : 30 + static_cast<int>(rng.range(0, 10));
          plan.push_back(std::move(p));
        }
        if (first_person && rng.chance(0.3)) {
          PlannedPost p;
          p.submission = true;
          p.body = rng.pick(kFiller);
          p.noise_title = true;
          plan.push_back(std::move(p));
        }
      }
    }

    // Filler and timestamps.
    const std::size_t n_filler =
        role == Role::bot_volume ? std::size_t{1501} : static_cast<std::size_t>(rng.range(3, 8));
    for (std::size_t i = 0; i < n_filler; ++i) {
      PlannedPost p;
      p.submission = role == Role::bot_volume || rng.chance(0.3);
      if (p.submission) p.title = rng.pick(kTitles);
      p.body = rng.pick(kFiller);
      plan.push_back(std::move(p));
    }
    rng.shuffle(plan);

    const std::int64_t t0 = kEpochStart + rng.range(0, 5 * kYear + kYear / 2);
    const std::int64_t span = static_cast<std::int64_t>(rng.real(0.05, 0.4) * static_cast<double>(kYear));
    std::vector<std::int64_t> times(plan.size());
    times.front() = t0;
    times.back() = t0 + span;
    for (std::size_t i = 1; i + 1 < times.size(); ++i) times[i] = t0 + rng.range(0, span);
    std::sort(times.begin(), times.end());

    std::int64_t created = t0 - rng.range(30 * kDay, 3 * kYear);
    if (ham_index == 0 && aplan != AgePlan::discarded) created = t0 - rng.range(kDay, 30 * kDay);
    if (aplan == AgePlan::discarded) created = t0 - rng.range(2 * kYear, 4 * kYear);
    created = std::max(created, kMinTimestamp);
    out.accounts.push_back({t.user_id, t.username, created});

    const double true_dob = static_cast<double>(t0) - first_age * static_cast<double>(kYear);
    for (std::size_t i = 0; i < plan.size(); ++i) {
      PlannedPost& p = plan[i];
      if (p.title_gender) {
        const int age = p.title_age ? *p.title_age
                                    : static_cast<int>(std::floor((static_cast<double>(times[i]) - true_dob) /
                                                                  static_cast<double>(kYear)));
        p.title = self_title(rng, age, *p.title_gender, p.title_first_person);
      } else if (p.noise_title) {
        p.title = "My brother [" + std::to_string(rng.range(40, 60)) + "m] " + rng.pick(kTitles);
      }
      Post post;
      post.post_id = "pst_" + pad(++next_post, 7);
      post.user_id = t.user_id;
      post.kind = p.submission ? PostKind::submission : PostKind::comment;
      if (p.submission) post.title = p.title;
      post.body = p.body;
      post.subreddit = rng.pick(kSubreddits);
      post.created_utc = times[i];
      out.posts.push_back(std::move(post));
    }

    // Truth and predictions for demographics.
    if (t.in_cohort) {
      const double first_t = static_cast<double>(times.front());
      const double mean_t =
          std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
      const double last_t = static_cast<double>(times.back());
      const double yr = static_cast<double>(kYear);
      if (aplan == AgePlan::self) {
        t.true_dob = static_cast<std::int64_t>(true_dob);
        t.age_first_post = age_bucket(first_age);
        t.age_mean = age_bucket(first_age + (mean_t - first_t) / yr);
      } else if (aplan == AgePlan::language || (aplan == AgePlan::unresolved && ham_index >= 0)) {
        // HAM groups anchor the midpoint at the most recent post.
        const double mid = kHam[ham_index].midpoint;
        t.age_first_post = age_bucket(mid - (last_t - first_t) / yr);
        t.age_mean = age_bucket(mid - (last_t - mean_t) / yr);
      }
      if (ham_index >= 0) predictions.push_back(ham_json(t.user_id, kHam[ham_index].label, rng.real(0.5, 0.9)));
      if (aplan == AgePlan::self && rng.chance(0.5))
        predictions.push_back(ham_json(t.user_id, kHam[rng.range(1, 4)].label, rng.real(0.5, 0.9)));
      if (ham_index >= 0 && rng.chance(0.3))  // lower-score rival that must lose
        predictions.push_back(ham_json(t.user_id, kHam[(ham_index + 2) % 5].label, 0.1));

      const double f_scores[] = {0.9, 0.95, 1.0};
      const double m_scores[] = {0.0, 0.05, 0.1};
      const double vague[] = {0.11, 0.5, 0.89};
      switch (gplan) {
        case GenderPlan::username:
          predictions.push_back(
              gender_json(t.user_id, gvalue == Gender::f ? rng.pick(f_scores) : rng.pick(m_scores), true, 0.8));
          if (rng.chance(0.5)) predictions.push_back(gender_json(t.user_id, rng.real(0.0, 1.0), false, 0.7));
          t.gender = gvalue;
          break;
        case GenderPlan::self:
          if (rng.chance(0.5)) predictions.push_back(gender_json(t.user_id, rng.pick(vague), true, 0.8));
          if (rng.chance(0.5)) predictions.push_back(gender_json(t.user_id, rng.real(0.0, 1.0), false, 0.7));
          t.gender = gvalue;
          break;
        case GenderPlan::language: {
          if (rng.chance(0.5)) predictions.push_back(gender_json(t.user_id, rng.pick(vague), true, 0.8));
          const double fv[] = {0.5, 0.7, 0.99};
          const double mv[] = {0.0, 0.3, 0.49};
          predictions.push_back(gender_json(t.user_id, gvalue == Gender::f ? rng.pick(fv) : rng.pick(mv), false, 0.7));
          t.gender = gvalue;
          break;
        }
        case GenderPlan::none:
          if (rng.chance(0.5)) predictions.push_back(gender_json(t.user_id, rng.pick(vague), true, 0.8));
          break;
      }

      const double c = rng.real(0.0, 1.0);
      if (c < 0.7) {
        const GridCell& cell = cells[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(cells.size()) - 1))];
        predictions.push_back(location_json(t.user_id, cell.lat, cell.lon, 0.9));
        if (rng.chance(0.2)) predictions.push_back(location_json(t.user_id, 0.0, -30.0, 0.2));
        t.country = cell.iso2;
      } else if (c < 0.8) {
        predictions.push_back(location_json(t.user_id, 0.0, -30.0, 0.9));  // open ocean
      }
    } else if (rng.chance(0.3)) {
      predictions.push_back(gender_json(t.user_id, rng.real(0.0, 1.0), true, 0.8));
    }

    if (!t.in_cohort) t.diagnoses.erase("MDD_conservative");
    out.truth.emplace(t.user_id, std::move(t));
  }
  review_rows.push_back("usr_99999,remove,not in corpus");

  for (const auto& p : predictions) out.predictions_jsonl += p + "\n";
  out.review_csv = "user_id,action,reason\n";
  for (const auto& r : review_rows) out.review_csv += r + "\n";

  // Gold: two annotators over a sample of cohort members.
  std::vector<const SynthTruth*> members;
  for (const auto& [uid, t] : out.truth)
    if (t.in_cohort) members.push_back(&t);
  rng.shuffle(members);
  members.resize(std::min(members.size(), options.n_gold));
  std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->user_id < b->user_id; });
  out.gold_csv = "user_id,variable,label,annotator_id\n";
  out.resolutions_csv = "user_id,variable,label\n";
  for (std::size_t i = 0; i < members.size(); ++i) {
    const SynthTruth& t = *members[i];
    const std::string gender = t.gender ? std::string(to_string(*t.gender)) : "?";
    const std::string country = t.country.value_or("?");
    const std::string dob = t.true_dob ? iso_date(*t.true_dob) : "?";
    const bool disagree = i < 3;
    for (const char* a : {"a1", "a2"}) {
      const bool second = std::string_view(a) == "a2";
      out.gold_csv += t.user_id + ",bd_diagnosis," + (second && disagree ? "no" : "yes") + "," + a + "\n";
      out.gold_csv += t.user_id + ",gender," + gender + "," + a + "\n";
      out.gold_csv += t.user_id + ",country," + country + "," + a + "\n";
      out.gold_csv += t.user_id + ",dob," + dob + "," + a + "\n";
    }
    if (disagree && i < 2) out.resolutions_csv += t.user_id + ",bd_diagnosis,yes\n";
  }
  return out;
}

void write_synth(const fs::path& dir, const SynthCorpus& corpus, const fs::path& patterns_dir,
                 const fs::path& country_grid) {
  fs::create_directories(dir);
  std::string posts;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    const Post& p = corpus.posts[i];
    json j;
    j["id"] = p.post_id;
    j["author_id"] = p.user_id;
    if (p.kind == PostKind::submission) {
      j["title"] = p.title.value_or("");
      j["selftext"] = p.body;
    } else {
      j["body"] = p.body;
    }
    j["subreddit"] = p.subreddit;
    j["created_utc"] = p.created_utc;
    posts += j.dump() + "\n";
    if (i == 10) posts += "{\"id\": \"broken\", \"author_id\": 17}\n";
    if (i == 20) posts += "not json at all\n";
    if (i == 30) posts += j.dump() + "\n";  // duplicate id
  }
  std::string accounts;
  for (const auto& a : corpus.accounts) accounts += serialize_account(a) + "\n";
  std::string truth;
  for (const auto& [uid, t] : corpus.truth) {
    json j;
    j["user_id"] = t.user_id;
    j["username"] = t.username;
    j["detected"] = t.detected;
    j["removal"] = t.removal;
    j["in_cohort"] = t.in_cohort;
    j["diagnoses"] = t.diagnoses;
    j["flags"] = t.flags;
    j["age_group_first_post"] = t.age_first_post ? json(std::string(to_string(*t.age_first_post))) : json(nullptr);
    j["age_group_mean"] = t.age_mean ? json(std::string(to_string(*t.age_mean))) : json(nullptr);
    j["gender"] = t.gender ? json(std::string(to_string(*t.gender))) : json(nullptr);
    j["country"] = t.country ? json(*t.country) : json(nullptr);
    truth += j.dump() + "\n";
  }
  write_file_atomic(dir / "posts.jsonl", posts);
  write_file_atomic(dir / "accounts.jsonl", accounts);
  write_file_atomic(dir / "predictions.jsonl", corpus.predictions_jsonl);
  write_file_atomic(dir / "review.csv", corpus.review_csv);
  write_file_atomic(dir / "gold.csv", corpus.gold_csv);
  write_file_atomic(dir / "resolutions.csv", corpus.resolutions_csv);
  write_file_atomic(dir / "secret.txt", "synthetic-export-secret\n");
  write_file_atomic(dir / "truth.jsonl", truth);
  std::ostringstream conf;
  conf << "# synthetic corpus\n"
       << "posts = posts.jsonl\n"
       << "accounts = accounts.jsonl\n"
       << "patterns = " << fs::absolute(patterns_dir).string() << "\n"
       << "predictions = predictions.jsonl\n"
       << "country_grid = " << fs::absolute(country_grid).string() << "\n"
       << "gold = gold.csv\n"
       << "resolutions = resolutions.csv\n"
       << "review = review.csv\n"
       << "secret_file = secret.txt\n"
       << "output_dir = out\n"
       << "threshold_chars = 55\n"
       << "mdd_policy = plain\n"
       << "top_n = 5\n"
       << "gold_sampling = random sample of cohort members\n";
  write_file_atomic(dir / "srd.conf", conf.str());
}

} // namespace srd
