#include "srd/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "srd/error.hpp"
#include "srd/evaluation.hpp"
#include "srd/io.hpp"
#include "srd/parallel.hpp"
#include "srd/profiler.hpp"
#include "srd/report.hpp"
#include "srd/store.hpp"
#include "srd/text.hpp"

namespace srd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log_line(const RunOptions& o, const std::string& msg) {
  if (o.log) *o.log << msg << '\n';
}

fs::path store_dir(const PipelineConfig& c) { return c.output_dir / "store"; }

void require(const fs::path& p, const char* key) {
  if (p.empty()) throw ConfigError(std::string("config must set ") + key);
}

std::string jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::vector<json> read_jsonl(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("missing " + path.string() + " (run the earlier stage first)");
  const std::string text = read_file(path);
  std::vector<json> rows;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const auto line = std::string_view(text).substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(line_no, path.filename().string() + ": " + e.what());
    }
  }
  return rows;
}

std::vector<CohortRecord> read_cohort(const PipelineConfig& c) {
  std::vector<CohortRecord> out;
  for (const auto& j : read_jsonl(c.output_dir / "cohort.jsonl")) out.push_back(cohort_record_from_json(j));
  return out;
}

std::vector<UserProfile> read_profiles(const PipelineConfig& c) {
  std::vector<UserProfile> out;
  for (const auto& j : read_jsonl(c.output_dir / "profiles.jsonl")) out.push_back(profile_from_json(j));
  return out;
}

json span_json(const std::optional<MatchSpan>& s) {
  if (!s) return nullptr;
  return json::array({s->start, s->end});
}

std::string pct_or_na(const std::optional<double>& fraction) {
  return fraction ? format_pct(100.0 * *fraction) : "n/a";
}

} // namespace

int cmd_ingest(const PipelineConfig& config, const RunOptions& options) {
  validate_config(config);
  require(config.posts, "posts");

  CorpusStore store;
  std::size_t skipped = 0, duplicates = 0, account_skipped = 0;
  {
    std::ifstream in(config.posts, std::ios::binary);
    if (!in) throw DataError("cannot open " + config.posts.string());
    PostReader reader(in, config.schema);
    std::set<std::string> seen;
    while (auto post = reader.next()) {
      if (!seen.insert(post->post_id).second) {
        ++duplicates;
        continue;
      }
      store.posts.push_back(std::move(*post));
    }
    skipped = reader.skipped();
  }
  if (!config.accounts.empty()) {
    std::ifstream in(config.accounts, std::ios::binary);
    if (!in) throw DataError("cannot open " + config.accounts.string());
    auto accounts = read_accounts(in, &account_skipped);
    std::set<std::string> seen;
    for (auto& a : accounts)
      if (seen.insert(a.user_id).second) store.accounts.push_back(std::move(a));
    std::sort(store.accounts.begin(), store.accounts.end(),
              [](const UserAccount& a, const UserAccount& b) { return a.user_id < b.user_id; });
  }
  std::sort(store.posts.begin(), store.posts.end(), [](const Post& a, const Post& b) {
    return std::tie(a.user_id, a.created_utc, a.post_id) < std::tie(b.user_id, b.created_utc, b.post_id);
  });

  json inputs = json::object();
  inputs["posts"] = {{"file", config.posts.filename().string()}, {"sha256", sha256_file_hex(config.posts)}};
  if (!config.accounts.empty())
    inputs["accounts"] = {{"file", config.accounts.filename().string()}, {"sha256", sha256_file_hex(config.accounts)}};
  store.manifest = {{"n_posts", store.posts.size()},
                    {"n_skipped", skipped},
                    {"n_duplicate", duplicates},
                    {"n_accounts", store.accounts.size()},
                    {"n_accounts_skipped", account_skipped},
                    {"inputs", inputs}};
  fs::create_directories(config.output_dir);
  write_store(store_dir(config), store);
  log_line(options, "ingest: " + std::to_string(store.posts.size()) + " posts, " + std::to_string(skipped) +
                        " malformed, " + std::to_string(duplicates) + " duplicate, " +
                        std::to_string(store.accounts.size()) + " accounts");
  return store.posts.empty() ? kExitEmpty : kExitOk;
}

int cmd_detect(const PipelineConfig& config, const RunOptions& options) {
  validate_config(config);
  require(config.patterns, "patterns");
  const PatternSet patterns = load_pattern_set(config.patterns.string());
  if (!patterns.condition_terms.contains(kCohortLabel))
    throw ConfigError("pattern directory has no conditions/" + kCohortLabel + ".txt");
  MatcherSet matchers;
  matchers.emplace(kCohortLabel, compile_matcher(patterns, kCohortLabel));
  for (const auto& label : kComorbidityLabels)
    if (patterns.condition_terms.contains(label)) matchers.emplace(label, compile_matcher(patterns, label));
  std::vector<ReviewEntry> review;
  if (!config.review.empty()) review = parse_review_csv(read_file(config.review));

  const CorpusStore store = read_store(store_dir(config));
  const auto& posts = store.posts;
  const CompiledMatcher& bd = matchers.at(kCohortLabel);

  const Cohort detected = detect_cohort(posts, bd, config.threshold_chars, options.threads);
  std::set<std::string> detected_users;
  for (const auto& [uid, e] : detected) detected_users.insert(uid);
  const auto comorbidities =
      extract_comorbidities(posts, detected_users, matchers, config.threshold_chars, options.threads);
  std::set<std::string> psychotic;
  for (const auto& [uid, p] : comorbidities)
    if (p.diagnoses.contains("Psychotic")) psychotic.insert(uid);

  const auto stats = build_user_stats(posts);
  const auto flags = flag_bot_candidates(stats, store.accounts);
  const ExclusionResult excl = apply_exclusions(detected, psychotic, flags, review);

  std::vector<json> cohort_rows, evidence_rows;
  std::size_t cohort_posts = 0;
  for (const auto& [uid, entry] : excl.cohort) {
    CohortRecord r;
    r.user_id = uid;
    for (auto f : entry.flags) r.flags.insert(std::string(to_string(f)));
    r.diagnoses = comorbidities.at(uid).diagnoses;
    for (const auto& ev : entry.evidence) r.evidence_post_ids.push_back(ev.post_id);
    if (auto it = stats.find(uid); it != stats.end()) r.n_posts = it->second.n_submissions + it->second.n_comments;
    cohort_posts += r.n_posts;
    cohort_rows.push_back(cohort_record_to_json(r));
    for (const auto& ev : entry.evidence)
      evidence_rows.push_back({{"user_id", uid},
                               {"post_id", ev.post_id},
                               {"label", ev.diagnosis_label},
                               {"decision", to_string(ev.decision)},
                               {"condition_span", span_json(ev.condition_span)},
                               {"inclusion_span", span_json(ev.inclusion_span)},
                               {"distance_chars", ev.distance_chars ? json(*ev.distance_chars) : json(nullptr)}});
  }

  std::string removals = tsv_row({"user_id", "reason"});
  for (const auto& r : excl.removed) removals += tsv_row({r.user_id, r.reason});

  std::map<std::string, std::string> review_actions;
  for (const auto& r : review) review_actions[r.user_id] = r.action == ReviewAction::remove ? "remove" : "keep";
  std::string candidates = tsv_row({"user_id", "flag", "review"});
  for (const auto& f : flags) {
    if (!detected_users.contains(f.user_id)) continue;
    auto it = review_actions.find(f.user_id);
    candidates += tsv_row({f.user_id, std::string(to_string(f.flag)), it == review_actions.end() ? "pending" : it->second});
  }

  DetectSummary summary;
  summary.n_posts = posts.size();
  summary.n_detected = detected.size();
  summary.removed_psychotic = excl.counts.psychotic;
  summary.removed_bot = excl.counts.bot;
  summary.removed_manual = excl.counts.manual;
  summary.n_cohort = excl.cohort.size();
  summary.n_cohort_posts = cohort_posts;

  fs::create_directories(config.output_dir);
  write_file_atomic(config.output_dir / "cohort.jsonl", jsonl(cohort_rows));
  write_file_atomic(config.output_dir / "evidence.jsonl", jsonl(evidence_rows));
  write_file_atomic(config.output_dir / "removals.tsv", removals);
  write_file_atomic(config.output_dir / "review_candidates.tsv", candidates);
  write_file_atomic(config.output_dir / "detect_summary.tsv", detect_summary_tsv(summary));
  for (const auto& w : excl.warnings) log_line(options, "detect: warning: " + w);
  log_line(options, "detect: " + std::to_string(detected.size()) + " detected, " +
                        std::to_string(excl.cohort.size()) + " in cohort");
  return kExitOk;
}

int cmd_profile(const PipelineConfig& config, const RunOptions& options) {
  validate_config(config);
  std::map<std::string, UserPredictions> predictions;
  if (!config.predictions.empty()) predictions = collect_predictions(parse_predictions(read_file(config.predictions)));
  std::optional<CountryGrid> grid;
  if (!config.country_grid.empty()) grid = CountryGrid::parse(read_file(config.country_grid));

  const auto cohort = read_cohort(config);
  const CorpusStore store = read_store(store_dir(config));

  std::map<std::string, std::size_t> index;
  std::vector<ProfileInput> inputs;
  for (const auto& r : cohort) {
    index.emplace(r.user_id, inputs.size());
    ProfileInput in;
    in.user_id = r.user_id;
    if (auto it = predictions.find(r.user_id); it != predictions.end()) in.predictions = &it->second;
    inputs.push_back(std::move(in));
  }
  for (const auto& p : store.posts)
    if (auto it = index.find(p.user_id); it != index.end()) inputs[it->second].posts.push_back(&p);
  for (const auto& a : store.accounts)
    if (auto it = index.find(a.user_id); it != index.end()) inputs[it->second].account_created_utc = a.created_utc;

  std::vector<UserProfile> profiles(inputs.size());
  parallel_for(inputs.size(), options.threads,
               [&](std::size_t i) { profiles[i] = build_profile(inputs[i], grid ? &*grid : nullptr); });
  std::sort(profiles.begin(), profiles.end(),
            [](const UserProfile& a, const UserProfile& b) { return a.user_id < b.user_id; });

  std::vector<json> rows;
  std::string review = tsv_row({"user_id", "flag", "self_reported_mean_age"});
  for (const auto& p : profiles) {
    rows.push_back(profile_to_json(p));
    for (auto f : p.flags) {
      const auto mean = p.methods.self_reported_mean_age;
      char buf[32] = "n/a";
      if (mean) std::snprintf(buf, sizeof buf, "%.1f", *mean);
      review += tsv_row({p.user_id, std::string(to_string(f)), buf});
    }
  }
  fs::create_directories(config.output_dir);
  write_file_atomic(config.output_dir / "profiles.jsonl", jsonl(rows));
  write_file_atomic(config.output_dir / "age_review.tsv", review);
  log_line(options, "profile: " + std::to_string(profiles.size()) + " profiles");
  return profiles.empty() ? kExitEmpty : kExitOk;
}

int cmd_evaluate(const PipelineConfig& config, const RunOptions& options) {
  validate_config(config);
  require(config.gold, "gold");
  const auto annotations = load_gold(read_file(config.gold));
  std::vector<Resolution> resolutions;
  if (!config.resolutions.empty()) resolutions = load_resolutions(read_file(config.resolutions));
  const auto cohort = read_cohort(config);
  const auto profiles = read_profiles(config);
  if (cohort.empty()) throw DataError("cohort is empty; nothing to evaluate");

  const ResolvedGold gold = resolve_gold(annotations, resolutions);
  using Labels = std::map<std::string, std::string>;

  Labels bd;
  for (const auto& r : cohort) bd[r.user_id] = "yes";

  Labels dob_self, dob_lang, dob_hybrid, country, g_user, g_self, g_lang, g_hybrid;
  auto put_gender = [](Labels& m, const std::string& uid, const std::optional<Gender>& g) {
    if (g) m[uid] = std::string(to_string(*g));
  };
  for (const auto& p : profiles) {
    if (p.methods.self_reported_dob) dob_self[p.user_id] = iso_date(*p.methods.self_reported_dob);
    if (p.methods.language_use_dob && !p.flags.contains(ProfileFlag::age_discarded_under13))
      dob_lang[p.user_id] = iso_date(*p.methods.language_use_dob);
    if (p.dob_utc) dob_hybrid[p.user_id] = iso_date(*p.dob_utc);
    if (p.country) country[p.user_id] = *p.country;
    put_gender(g_user, p.user_id, p.methods.username_gender);
    put_gender(g_self, p.user_id, p.methods.self_reported_gender);
    put_gender(g_lang, p.user_id, p.methods.language_use_gender);
    put_gender(g_hybrid, p.user_id, p.gender);
  }

  const std::size_t population = cohort.size();
  std::vector<EvaluationResult> results;
  auto score = [&](GoldVariable v, const char* name, const Labels& preds) {
    results.push_back(score_method(v, name, preds, gold_for(gold, v), population));
  };
  score(GoldVariable::bd_diagnosis, "Pattern matching", bd);
  score(GoldVariable::dob, "Self-reported", dob_self);
  score(GoldVariable::dob, "Language use", dob_lang);
  score(GoldVariable::dob, "Hybrid", dob_hybrid);
  score(GoldVariable::country, "Geolocation", country);
  score(GoldVariable::gender, "Username", g_user);
  score(GoldVariable::gender, "Self-reported", g_self);
  score(GoldVariable::gender, "Language use", g_lang);
  score(GoldVariable::gender, "Hybrid", g_hybrid);

  std::string table =
      tsv_row({"variable", "method", "n_test", "accuracy_test", "coverage_test", "coverage_all"});
  for (const auto& r : results)
    table += tsv_row({std::string(to_string(r.variable)), r.method_name, std::to_string(r.n_gold),
                      pct_or_na(r.accuracy), pct_or_na(r.coverage_test), format_pct(100.0 * r.coverage_all)});

  std::string agreement = tsv_row({"variable", "n_users", "n_agree", "raw_agreement", "unresolved"});
  std::vector<std::string> warnings;
  for (auto v : {GoldVariable::bd_diagnosis, GoldVariable::dob, GoldVariable::country, GoldVariable::gender}) {
    const auto a = raw_agreement(annotations, v);
    if (a.n_users == 0) continue;
    const auto un = gold.unresolved.find(v);
    agreement += tsv_row({std::string(to_string(v)), std::to_string(a.n_users), std::to_string(a.n_agree),
                          a.percent ? format_pct(*a.percent) : "n/a",
                          std::to_string(un == gold.unresolved.end() ? 0 : un->second)});
    warnings.insert(warnings.end(), a.warnings.begin(), a.warnings.end());
  }

  std::string notes;
  const auto methods = agreement_rate({g_user, g_self, g_lang});
  const char* names[] = {"Username", "Self-reported", "Language use"};
  notes += "gender methods, users labelled by all three: " + std::to_string(methods.n_joint) + ", agreeing: " +
           (methods.joint_percent ? format_pct(*methods.joint_percent) + "%" : std::string("n/a")) + "\n";
  for (const auto& pair : methods.pairs)
    notes += std::string("gender ") + names[pair.a] + " vs " + names[pair.b] + ": " + std::to_string(pair.n_users) +
             " users, " + (pair.percent ? format_pct(*pair.percent) + "%" : std::string("n/a")) + " agree\n";
  if (!config.gold_sampling.empty())
    notes += "note: gold sample provenance: " + config.gold_sampling +
             ". Coverage on the test set is biased upward for any method the sample was drawn from.\n";
  for (const auto& w : warnings) notes += "warning: " + w + "\n";

  fs::create_directories(config.output_dir);
  write_file_atomic(config.output_dir / "evaluation.tsv", table);
  write_file_atomic(config.output_dir / "agreement.tsv", agreement);
  write_file_atomic(config.output_dir / "evaluation_notes.txt", notes);
  log_line(options, "evaluate: " + std::to_string(results.size()) + " rows");
  return kExitOk;
}

int cmd_report(const PipelineConfig& config, const RunOptions& options) {
  validate_config(config);
  std::map<std::string, Baseline> baselines;
  for (const auto& [name, path] : config.baselines) baselines[name] = parse_baseline(read_file(path));

  const auto cohort = read_cohort(config);
  std::vector<UserProfile> profiles;
  if (!cohort.empty()) profiles = read_profiles(config);
  const fs::path summary_path = config.output_dir / "detect_summary.tsv";
  if (!fs::exists(summary_path)) throw DataError("missing " + summary_path.string() + " (run detect first)");
  const DetectSummary detect = parse_detect_summary(read_file(summary_path));

  const ReportBundle bundle = build_report(cohort, profiles, detect, config.mdd_policy, config.top_n);
  const auto files = render_report(bundle, baselines);
  const fs::path dir = config.output_dir / "report";
  fs::create_directories(dir);
  for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
  if (cohort.empty()) {
    log_line(options, "report: warning: cohort is empty");
    return kExitEmpty;
  }
  log_line(options, "report: " + std::to_string(cohort.size()) + " users");
  return kExitOk;
}

int cmd_export(const PipelineConfig& config, const RunOptions& options) {
  validate_config(config);
  std::string secret;
  if (!config.secret_file.empty()) {
    secret = std::string(trim(read_file(config.secret_file)));
  } else if (const char* env = std::getenv("SRD_EXPORT_SECRET")) {
    secret = env;
  }
  if (secret.empty()) throw ConfigError("export needs secret_file or SRD_EXPORT_SECRET");

  const CorpusStore store = read_store(store_dir(config));
  const auto exported = pseudonymize_export(store.posts, store.accounts, secret);

  std::string posts, accounts, id_map = "kind,original_id,token\n";
  for (const auto& p : exported.posts) posts += serialize_post(p) + "\n";
  for (const auto& a : exported.accounts) accounts += serialize_account(a) + "\n";
  for (const auto& m : exported.id_map) id_map += m.kind + "," + csv_field(m.original) + "," + m.token + "\n";

  const fs::path dir = config.output_dir / "export";
  fs::create_directories(dir);
  write_file_atomic(dir / "posts.jsonl", posts);
  write_file_atomic(dir / "accounts.jsonl", accounts);
  write_file_atomic(config.output_dir / "id_map.csv", id_map);
  log_line(options, "export: " + std::to_string(exported.posts.size()) + " posts, " +
                        std::to_string(exported.accounts.size()) + " accounts");
  return kExitOk;
}

} // namespace srd
