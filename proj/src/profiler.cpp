#include "srd/profiler.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "srd/error.hpp"
#include "srd/io.hpp"
#include "srd/text.hpp"

namespace srd {

using nlohmann::json;

std::string_view to_string(Gender g) { return g == Gender::f ? "f" : "m"; }

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "f" || s == "F") return Gender::f;
  if (s == "m" || s == "M") return Gender::m;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return c >= 'a' && c <= 'z'; }

std::size_t skip_spaces(std::string_view s, std::size_t p) {
  while (p < s.size() && s[p] == ' ') ++p;
  return p;
}

// Optional separator between age and gender: spaces with at most one '/'.
std::size_t skip_separator(std::string_view s, std::size_t p) {
  p = skip_spaces(s, p);
  if (p < s.size() && s[p] == '/') p = skip_spaces(s, p + 1);
  return p;
}

bool parse_age(std::string_view s, std::size_t& p, int& age) {
  if (p + 2 > s.size() || !is_digit(s[p]) || !is_digit(s[p + 1])) return false;
  if (p + 2 < s.size() && is_digit(s[p + 2])) return false;
  age = (s[p] - '0') * 10 + (s[p + 1] - '0');
  p += 2;
  return true;
}

bool parse_gender_letter(std::string_view s, std::size_t& p, Gender& g) {
  if (p >= s.size() || (s[p] != 'f' && s[p] != 'm')) return false;
  if (p + 1 < s.size() && is_alpha(s[p + 1])) return false;
  g = s[p] == 'f' ? Gender::f : Gender::m;
  ++p;
  return true;
}

bool preceded_by_pronoun(std::string_view s, std::size_t pos) {
  std::size_t gap = 0;
  while (true) {
    while (pos > 0 && s[pos - 1] == ' ') --pos;
    if (pos == 0) return false;
    // A whole word ending here?
    if (is_word_before(s, pos) && !is_word_at(s, pos)) {
      std::size_t b = pos;
      while (b > 0 && is_word_before(s, b)) b = previous_boundary(s, b);
      const auto word = s.substr(b, pos - b);
      if (word == "i" || word == "me" || word == "my") return true;
    }
    if (gap == 3) return false;
    pos = previous_boundary(s, pos);
    ++gap;
  }
}

} // namespace

std::vector<SelfReportCandidate> extract_self_report(std::string_view title, std::string_view post_id) {
  const std::string norm = normalize_text(title);
  const std::string_view s = norm;
  std::vector<SelfReportCandidate> out;
  for (std::size_t open = 0; open < s.size(); ++open) {
    const char o = s[open];
    if (o != '[' && o != '(') continue;
    const char close = o == '[' ? ']' : ')';
    std::size_t p = skip_spaces(s, open + 1);
    int age = 0;
    Gender g = Gender::f;
    bool ok;
    if (p < s.size() && is_digit(s[p])) {
      ok = parse_age(s, p, age);
      if (ok) {
        p = skip_separator(s, p);
        ok = parse_gender_letter(s, p, g);
      }
    } else {
      ok = parse_gender_letter(s, p, g);
      if (ok) {
        p = skip_separator(s, p);
        ok = parse_age(s, p, age);
      }
    }
    if (!ok) continue;
    p = skip_spaces(s, p);
    if (p >= s.size() || s[p] != close) continue;
    if (age < kMinAge || age > kMaxAge) continue;
    SelfReportCandidate c;
    c.post_id = std::string(post_id);
    c.age = age;
    c.gender = g;
    c.start = open;
    c.end = p + 1;
    c.first_person = preceded_by_pronoun(s, open);
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<std::int64_t> estimate_dob(int age_years, std::int64_t post_utc) {
  if (age_years < kMinAge || age_years > kMaxAge) return std::nullopt;
  return post_utc - static_cast<std::int64_t>(age_years) * kSecondsPerYear;
}

double age_at(std::int64_t dob_utc, std::int64_t t_utc) {
  return static_cast<double>(t_utc - dob_utc) / static_cast<double>(kSecondsPerYear);
}

std::optional<SelfReport> choose_self_report(std::span<const DatedCandidate> candidates) {
  if (candidates.empty()) return std::nullopt;
  const bool any_first = std::any_of(candidates.begin(), candidates.end(),
                                     [](const DatedCandidate& c) { return c.candidate.first_person; });
  std::vector<std::int64_t> dobs;
  int female = 0, male = 0;
  for (const auto& c : candidates) {
    if (any_first && !c.candidate.first_person) continue;
    (c.candidate.gender == Gender::f ? female : male)++;
    if (auto dob = estimate_dob(c.candidate.age, c.post_utc)) dobs.push_back(*dob);
  }
  SelfReport r;
  if (female > male)
    r.gender = Gender::f;
  else if (male > female)
    r.gender = Gender::m;
  if (!dobs.empty()) {
    std::sort(dobs.begin(), dobs.end());
    if (dobs.back() - dobs.front() > 3 * kSecondsPerYear) {
      r.age_unresolved = true;
    } else {
      const std::size_t n = dobs.size();
      r.dob_utc = n % 2 == 1 ? dobs[n / 2] : dobs[n / 2 - 1] + (dobs[n / 2] - dobs[n / 2 - 1]) / 2;
    }
  }
  return r;
}

std::string iso_date(std::int64_t utc) {
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_seconds{seconds{utc}});
  const year_month_day ymd{day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<std::int64_t> parse_iso_date(std::string_view s) {
  using namespace std::chrono;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!is_digit(s[i])) return std::nullopt;
  const int y = std::stoi(std::string(s.substr(0, 4)));
  const unsigned m = static_cast<unsigned>(std::stoi(std::string(s.substr(5, 2))));
  const unsigned d = static_cast<unsigned>(std::stoi(std::string(s.substr(8, 2))));
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  return duration_cast<seconds>(sys_days{ymd}.time_since_epoch()).count();
}

PostingAges posting_ages(std::int64_t dob_utc, std::span<const std::int64_t> post_times) {
  if (post_times.empty()) throw DataError("posting ages need at least one post");
  PostingAges a;
  const auto first = *std::min_element(post_times.begin(), post_times.end());
  a.first_post_age = age_at(dob_utc, first);
  double sum = 0.0;
  for (auto t : post_times) {
    const double age = age_at(dob_utc, t);
    sum += age;
    if (age < kMinAge) a.post_before_13 = true;
  }
  a.mean_posting_age = sum / static_cast<double>(post_times.size());
  return a;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ReportAgeGroup g) {
  switch (g) {
    case ReportAgeGroup::g13_17: return "13-17";
    case ReportAgeGroup::g18_29: return "18-29";
    case ReportAgeGroup::g30_49: return "30-49";
    case ReportAgeGroup::g50_64: return "50-64";
    case ReportAgeGroup::g65_plus: return "65+";
  }
  return "?";
}

ReportAgeGroup bucket_age(double age_years) {
  if (!(age_years >= 13.0)) throw DataError("age below 13 has no report group");
  if (age_years < 18.0) return ReportAgeGroup::g13_17;
  if (age_years < 30.0) return ReportAgeGroup::g18_29;
  if (age_years < 50.0) return ReportAgeGroup::g30_49;
  if (age_years < 65.0) return ReportAgeGroup::g50_64;
  return ReportAgeGroup::g65_plus;
}

std::string_view to_string(HamAgeGroup g) {
  switch (g) {
    case HamAgeGroup::under14: return "<14";
    case HamAgeGroup::g14_23: return "14-23";
    case HamAgeGroup::g24_45: return "24-45";
    case HamAgeGroup::g46_65: return "46-65";
    case HamAgeGroup::g66_plus: return "66+";
  }
  return "?";
}

std::optional<HamAgeGroup> parse_ham_group(std::string_view s) {
  for (auto g : {HamAgeGroup::under14, HamAgeGroup::g14_23, HamAgeGroup::g24_45, HamAgeGroup::g46_65,
                 HamAgeGroup::g66_plus})
    if (s == to_string(g)) return g;
  return std::nullopt;
}

double ham_midpoint_age(HamAgeGroup g) {
  switch (g) {
    case HamAgeGroup::under14: return 13.5;
    case HamAgeGroup::g14_23: return 18.5;
    case HamAgeGroup::g24_45: return 34.5;
    case HamAgeGroup::g46_65: return 55.5;
    case HamAgeGroup::g66_plus: return 78.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

namespace {

bool on_half_grid(double v) {
  const double twice = v * 2.0;
  return std::isfinite(twice) && twice == std::round(twice);
}

} // namespace

std::vector<BackendPrediction> parse_predictions(std::string_view jsonl) {
  std::vector<BackendPrediction> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    ++line_no;
    const auto line = trim(jsonl.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(line_no, "prediction is not a JSON object");
    BackendPrediction p;
    try {
      p.user_id = j.at("user_id").get<std::string>();
      const auto attr = j.at("attribute").get<std::string>();
      p.score = j.value("score", 1.0);
      p.model_id = j.value("model_id", std::string{});
      const json& v = j.at("value");
      if (attr == "age_group") {
        p.attribute = PredictionAttribute::age_group;
        auto g = parse_ham_group(v.get<std::string>());
        if (!g) throw ParseError(line_no, "unknown age group '" + v.get<std::string>() + "'");
        p.value = *g;
      } else if (attr == "gender") {
        p.attribute = PredictionAttribute::gender;
        const double score = v.get<double>();
        if (!(score >= 0.0 && score <= 1.0)) throw ParseError(line_no, "gender value outside [0,1]");
        p.value = score;
      } else if (attr == "location") {
        p.attribute = PredictionAttribute::location;
        if (!v.is_array() || v.size() != 2) throw ParseError(line_no, "location value must be [lat, lon]");
        LatLon ll{v[0].get<double>(), v[1].get<double>()};
        if (ll.lat < -90 || ll.lat > 90 || ll.lon < -180 || ll.lon > 180 || !on_half_grid(ll.lat) ||
            !on_half_grid(ll.lon))
          throw ParseError(line_no, "location must lie on the 0.5 degree grid");
        p.value = ll;
      } else {
        throw ParseError(line_no, "unknown attribute '" + attr + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("bad prediction row: ") + e.what());
    }
    if (p.user_id.empty()) throw ParseError(line_no, "empty user_id");
    if (!(p.score >= 0.0 && p.score <= 1.0)) throw ParseError(line_no, "score outside [0,1]");
    out.push_back(std::move(p));
  }
  return out;
}

std::map<std::string, UserPredictions> collect_predictions(std::span<const BackendPrediction> predictions) {
  std::map<std::string, UserPredictions> out;
  std::map<std::pair<std::string, int>, double> best;  // (user, slot) -> score
  for (const auto& p : predictions) {
    int slot = 0;
    if (p.attribute == PredictionAttribute::gender)
      slot = p.model_id.starts_with(kUsernameModelPrefix) ? 1 : 2;
    else if (p.attribute == PredictionAttribute::location)
      slot = 3;
    auto [it, fresh] = best.try_emplace({p.user_id, slot}, p.score);
    if (!fresh) {
      if (p.score <= it->second) continue;
      it->second = p.score;
    }
    auto& u = out[p.user_id];
    switch (slot) {
      case 0: u.age_group = std::get<HamAgeGroup>(p.value); break;
      case 1: u.username_score = std::get<double>(p.value); break;
      case 2: u.language_gender = std::get<double>(p.value); break;
      case 3: u.location = std::get<LatLon>(p.value); break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

int wrap_lon_index(int idx) {
  // Longitude index in half degrees, mapped into [-360, 360).
  idx %= 720;
  if (idx < -360) idx += 720;
  if (idx >= 360) idx -= 720;
  return idx;
}

} // namespace

double great_circle_degrees(LatLon a, LatLon b) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * std::asin(std::min(1.0, std::sqrt(h))) / rad;
}

CountryGrid CountryGrid::parse(std::string_view csv) {
  const auto rows = parse_csv(csv);
  CountryGrid g;
  if (rows.empty()) return g;
  if (rows[0].size() < 3 || trim(rows[0][0]) != "lat" || trim(rows[0][1]) != "lon" || trim(rows[0][2]) != "iso2")
    throw ParseError(1, "country grid header must be lat,lon,iso2");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) throw ParseError(r + 1, "expected 3 columns");
    double lat, lon;
    try {
      std::size_t used = 0;
      lat = std::stod(row[0], &used);
      if (used != row[0].size()) throw std::invalid_argument("lat");
      lon = std::stod(row[1], &used);
      if (used != row[1].size()) throw std::invalid_argument("lon");
    } catch (const std::exception&) {
      throw ParseError(r + 1, "non-numeric coordinate");
    }
    if (lat < -90 || lat > 90 || lon < -180 || lon > 180 || !on_half_grid(lat) || !on_half_grid(lon))
      throw ParseError(r + 1, "coordinate off the 0.5 degree grid");
    const std::string iso(trim(row[2]));
    if (iso.size() != 2 || !std::isupper(static_cast<unsigned char>(iso[0])) ||
        !std::isupper(static_cast<unsigned char>(iso[1])))
      throw ParseError(r + 1, "iso2 must be two upper-case letters");
    const std::pair<int, int> key{static_cast<int>(std::lround(lat * 2)),
                                  wrap_lon_index(static_cast<int>(std::lround(lon * 2)))};
    auto [it, fresh] = g.cells_.emplace(key, iso);
    if (!fresh && it->second != iso) throw ParseError(r + 1, "conflicting country for a cell");
  }
  return g;
}

std::optional<std::string> CountryGrid::lookup(double lat, double lon) const {
  const int lat_i = static_cast<int>(std::lround(lat * 2));
  const int lon_i = wrap_lon_index(static_cast<int>(std::lround(lon * 2)));
  if (auto it = cells_.find({lat_i, lon_i}); it != cells_.end()) return it->second;

  constexpr int lat_steps = static_cast<int>(kCountryFallbackDegrees * 2);
  const double edge = std::min(89.999, std::abs(lat) + kCountryFallbackDegrees);
  int lon_steps = static_cast<int>(std::ceil(kCountryFallbackDegrees / std::cos(edge * std::numbers::pi / 180.0) * 2)) + 1;
  lon_steps = std::min(lon_steps, 360);

  const LatLon origin{lat, lon};
  const std::string* best = nullptr;
  double best_d = kCountryFallbackDegrees;
  std::pair<int, int> best_key{};
  for (int dl = -lat_steps; dl <= lat_steps; ++dl) {
    const int li = lat_i + dl;
    if (li < -180 || li > 180) continue;
    for (int dn = -lon_steps; dn <= lon_steps; ++dn) {
      const int ni = wrap_lon_index(lon_i + dn);
      auto it = cells_.find({li, ni});
      if (it == cells_.end()) continue;
      const double d = great_circle_degrees(origin, {li / 2.0, ni / 2.0});
      const std::pair<int, int> key{li, ni};
      if (d > kCountryFallbackDegrees) continue;
      if (best == nullptr || d < best_d || (d == best_d && key < best_key)) {
        best = &it->second;
        best_d = d;
        best_key = key;
      }
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

// ---------------------------------------------------------------------------

std::string_view to_string(AgeSource s) {
  switch (s) {
    case AgeSource::self_reported: return "self_reported";
    case AgeSource::language_use: return "language_use";
    case AgeSource::none: return "none";
  }
  return "?";
}

std::string_view to_string(GenderSource s) {
  switch (s) {
    case GenderSource::username: return "username";
    case GenderSource::self_reported: return "self_reported";
    case GenderSource::language_use: return "language_use";
    case GenderSource::none: return "none";
  }
  return "?";
}

std::string_view to_string(ProfileFlag f) {
  switch (f) {
    case ProfileFlag::age_review_low: return "age_review_low";
    case ProfileFlag::age_review_high: return "age_review_high";
    case ProfileFlag::age_discarded_under13: return "age_discarded_under13";
    case ProfileFlag::age_post_under13: return "age_post_under13";
  }
  return "?";
}

void apply_age_corrections(UserProfile& profile, std::optional<std::int64_t> account_created_utc) {
  auto& m = profile.methods;
  if (m.self_reported_mean_age) {
    if (*m.self_reported_mean_age < 16.0) profile.flags.insert(ProfileFlag::age_review_low);
    if (*m.self_reported_mean_age > 60.0) profile.flags.insert(ProfileFlag::age_review_high);
  }
  if (m.language_use_dob && account_created_utc && age_at(*m.language_use_dob, *account_created_utc) < kMinAge) {
    m.language_use_dob.reset();
    m.language_use_group.reset();
    profile.flags.insert(ProfileFlag::age_discarded_under13);
  }
}

AgeAssignment hybrid_age(const MethodValues& methods) {
  if (methods.self_reported_dob) return {methods.self_reported_dob, AgeSource::self_reported};
  if (methods.language_use_dob) return {methods.language_use_dob, AgeSource::language_use};
  return {};
}

std::optional<Gender> username_gender_decision(double score) {
  if (score <= 0.1) return Gender::m;
  if (score >= 0.9) return Gender::f;
  return std::nullopt;
}

Gender language_gender_decision(double value) { return value >= 0.5 ? Gender::f : Gender::m; }

GenderAssignment hybrid_gender(std::optional<double> username_score, std::optional<Gender> self_reported,
                               std::optional<double> language_value) {
  if (username_score)
    if (auto g = username_gender_decision(*username_score)) return {g, GenderSource::username};
  if (self_reported) return {self_reported, GenderSource::self_reported};
  if (language_value) return {language_gender_decision(*language_value), GenderSource::language_use};
  return {};
}

UserProfile build_profile(const ProfileInput& input, const CountryGrid* grid) {
  UserProfile prof;
  prof.user_id = input.user_id;
  auto& m = prof.methods;

  std::vector<std::int64_t> times;
  times.reserve(input.posts.size());
  std::vector<DatedCandidate> candidates;
  for (const Post* p : input.posts) {
    times.push_back(p->created_utc);
    if (p->kind == PostKind::submission && p->title)
      for (auto& c : extract_self_report(*p->title, p->post_id)) candidates.push_back({std::move(c), p->created_utc});
  }
  if (auto sr = choose_self_report(candidates)) {
    m.self_reported_dob = sr->dob_utc;
    m.self_reported_gender = sr->gender;
    if (sr->dob_utc && !times.empty()) m.self_reported_mean_age = posting_ages(*sr->dob_utc, times).mean_posting_age;
  }

  const UserPredictions* pred = input.predictions;
  if (pred != nullptr) {
    if (pred->age_group && !times.empty()) {
      const auto last = *std::max_element(times.begin(), times.end());
      m.language_use_group = pred->age_group;
      m.language_use_dob = last - static_cast<std::int64_t>(ham_midpoint_age(*pred->age_group) *
                                                            static_cast<double>(kSecondsPerYear));
    }
    if (pred->username_score) m.username_gender = username_gender_decision(*pred->username_score);
    if (pred->language_gender) m.language_use_gender = language_gender_decision(*pred->language_gender);
  }

  apply_age_corrections(prof, input.account_created_utc);

  const auto age = hybrid_age(m);
  prof.dob_utc = age.dob_utc;
  prof.age_source = age.source;
  if (age.dob_utc && !times.empty()) {
    const auto ages = posting_ages(*age.dob_utc, times);
    prof.first_post_age = ages.first_post_age;
    prof.mean_posting_age = ages.mean_posting_age;
    if (ages.post_before_13) prof.flags.insert(ProfileFlag::age_post_under13);
    if (ages.first_post_age >= kMinAge) prof.age_group_first_post = bucket_age(ages.first_post_age);
    if (ages.mean_posting_age >= kMinAge) prof.age_group_mean = bucket_age(ages.mean_posting_age);
  } else {
    prof.age_source = AgeSource::none;
    prof.dob_utc.reset();
  }

  const auto g = hybrid_gender(pred ? pred->username_score : std::nullopt, m.self_reported_gender,
                               pred ? pred->language_gender : std::nullopt);
  prof.gender = g.gender;
  prof.gender_source = g.source;

  if (pred != nullptr && pred->location && grid != nullptr)
    prof.country = grid->lookup(pred->location->lat, pred->location->lon);
  return prof;
}

// ---------------------------------------------------------------------------

namespace {

template <class T, class F>
json opt(const std::optional<T>& v, F&& f) {
  return v ? json(f(*v)) : json(nullptr);
}

auto str = [](auto v) { return std::string(to_string(v)); };
auto date = [](std::int64_t v) { return iso_date(v); };
auto same = [](auto v) { return v; };

template <class T, class Parse>
std::optional<T> read_opt(const json& j, const char* key, Parse&& parse) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return parse(*it);
}

Gender gender_of(const json& v) {
  auto g = parse_gender(v.get<std::string>());
  if (!g) throw DataError("bad gender value in profile");
  return *g;
}

} // namespace

json profile_to_json(const UserProfile& p) {
  json j;
  j["user_id"] = p.user_id;
  j["dob"] = opt(p.dob_utc, date);
  j["dob_utc"] = opt(p.dob_utc, same);
  j["age_source"] = str(p.age_source);
  j["first_post_age"] = opt(p.first_post_age, same);
  j["mean_posting_age"] = opt(p.mean_posting_age, same);
  j["age_group_first_post"] = opt(p.age_group_first_post, str);
  j["age_group_mean"] = opt(p.age_group_mean, str);
  j["gender"] = opt(p.gender, str);
  j["gender_source"] = str(p.gender_source);
  j["country"] = opt(p.country, same);
  json flags = json::array();
  for (auto f : p.flags) flags.push_back(str(f));
  j["flags"] = flags;
  const auto& m = p.methods;
  j["methods"] = {
      {"age",
       {{"self_reported", opt(m.self_reported_dob, date)},
        {"self_reported_dob_utc", opt(m.self_reported_dob, same)},
        {"self_reported_mean_age", opt(m.self_reported_mean_age, same)},
        {"language_use", opt(m.language_use_dob, date)},
        {"language_use_dob_utc", opt(m.language_use_dob, same)},
        {"language_use_group", opt(m.language_use_group, str)}}},
      {"gender",
       {{"username", opt(m.username_gender, str)},
        {"self_reported", opt(m.self_reported_gender, str)},
        {"language_use", opt(m.language_use_gender, str)}}}};
  return j;
}

UserProfile profile_from_json(const json& j) {
  auto group = [](const json& v) {
    const auto s = v.get<std::string>();
    for (auto g : kReportAgeGroups)
      if (s == to_string(g)) return g;
    throw DataError("bad age group '" + s + "' in profile");
  };
  auto i64 = [](const json& v) { return v.get<std::int64_t>(); };
  auto dbl = [](const json& v) { return v.get<double>(); };
  try {
    UserProfile p;
    p.user_id = j.at("user_id").get<std::string>();
    p.dob_utc = read_opt<std::int64_t>(j, "dob_utc", i64);
    const auto age_src = j.at("age_source").get<std::string>();
    p.age_source = age_src == "self_reported"  ? AgeSource::self_reported
                   : age_src == "language_use" ? AgeSource::language_use
                                               : AgeSource::none;
    p.first_post_age = read_opt<double>(j, "first_post_age", dbl);
    p.mean_posting_age = read_opt<double>(j, "mean_posting_age", dbl);
    p.age_group_first_post = read_opt<ReportAgeGroup>(j, "age_group_first_post", group);
    p.age_group_mean = read_opt<ReportAgeGroup>(j, "age_group_mean", group);
    p.gender = read_opt<Gender>(j, "gender", gender_of);
    const auto g_src = j.at("gender_source").get<std::string>();
    p.gender_source = g_src == "username"        ? GenderSource::username
                      : g_src == "self_reported" ? GenderSource::self_reported
                      : g_src == "language_use"  ? GenderSource::language_use
                                                 : GenderSource::none;
    p.country = read_opt<std::string>(j, "country", [](const json& v) { return v.get<std::string>(); });
    for (const auto& f : j.at("flags")) {
      const auto s = f.get<std::string>();
      for (auto flag : {ProfileFlag::age_review_low, ProfileFlag::age_review_high, ProfileFlag::age_discarded_under13,
                        ProfileFlag::age_post_under13})
        if (s == to_string(flag)) p.flags.insert(flag);
    }
    const json& age = j.at("methods").at("age");
    const json& gen = j.at("methods").at("gender");
    auto& m = p.methods;
    m.self_reported_dob = read_opt<std::int64_t>(age, "self_reported_dob_utc", i64);
    m.self_reported_mean_age = read_opt<double>(age, "self_reported_mean_age", dbl);
    m.language_use_dob = read_opt<std::int64_t>(age, "language_use_dob_utc", i64);
    m.language_use_group = read_opt<HamAgeGroup>(age, "language_use_group", [](const json& v) {
      auto g = parse_ham_group(v.get<std::string>());
      if (!g) throw DataError("bad HAM group in profile");
      return *g;
    });
    m.username_gender = read_opt<Gender>(gen, "username", gender_of);
    m.self_reported_gender = read_opt<Gender>(gen, "self_reported", gender_of);
    m.language_use_gender = read_opt<Gender>(gen, "language_use", gender_of);
    return p;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed profile record: ") + e.what());
  }
}

} // namespace srd
