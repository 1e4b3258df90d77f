#include <doctest.h>

#include <fstream>

#include "srd/error.hpp"
#include "srd/io.hpp"
#include "srd/store.hpp"
#include "synth_run.hpp"

using namespace srd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) { return fs::temp_directory_path() / ("srd_test_pipeline_" + std::string(name)); }

void write(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << s;
}

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

} // namespace

TEST_CASE("synthetic corpus end to end matches what was planted") {
  const auto dir = scratch("e2e");
  const auto run = synth_run::run_all(dir, 500, 1, 2);
  for (const auto& [stage, code] : run.exit_codes) CHECK_MESSAGE(code == kExitOk, stage);

  const auto diffs = synth_run::compare_to_truth(run);
  for (std::size_t i = 0; i < diffs.size() && i < 20; ++i) MESSAGE(diffs[i]);
  CHECK(diffs.empty());

  const auto store = read_store(run.config.output_dir / "store");
  CHECK(store.manifest.at("n_skipped") == 2);
  CHECK(store.manifest.at("n_duplicate") == 1);
  CHECK(store.posts.size() == run.corpus.posts.size());

  const auto summary = parse_detect_summary(read_file(run.config.output_dir / "detect_summary.tsv"));
  std::size_t psychotic = 0, bot = 0, manual = 0, cohort = 0;
  for (const auto& [uid, t] : run.corpus.truth) {
    psychotic += t.removal == "psychotic";
    bot += t.removal == "bot";
    manual += t.removal == "manual";
    cohort += t.in_cohort;
  }
  CHECK(summary.removed_psychotic == psychotic);
  CHECK(summary.removed_bot == bot);
  CHECK(summary.removed_manual == manual);
  CHECK(summary.n_cohort == cohort);

  const auto eval = read_file(run.config.output_dir / "evaluation.tsv");
  CHECK(count_substr(eval, "\n") == 10);
  const auto agreement = read_file(run.config.output_dir / "agreement.tsv");
  CHECK(agreement.find("bd_diagnosis\t100\t97\t97.0\t1") != std::string::npos);
  for (const char* f : {"comorbidity.tsv", "age_groups.tsv", "gender.tsv", "countries.tsv", "summary.tsv"})
    CHECK(fs::exists(run.config.output_dir / "report" / f));

  // no temporary files survive
  for (const auto& e : fs::recursive_directory_iterator(run.config.output_dir))
    CHECK(e.path().extension() != ".tmp");
  fs::remove_all(dir);
}

TEST_CASE("export replaces every id and keeps the map outside the export") {
  const auto dir = scratch("export");
  const auto run = synth_run::run_all(dir, 150, 3, 1);
  const fs::path out = run.config.output_dir;
  CHECK(fs::exists(out / "id_map.csv"));
  CHECK_FALSE(fs::exists(out / "export" / "id_map.csv"));

  std::string exported;
  for (const auto& e : fs::recursive_directory_iterator(out / "export"))
    if (e.is_regular_file()) exported += read_file(e.path());
  std::size_t leaks = 0;
  for (const auto& p : run.corpus.posts) leaks += exported.find("\"" + p.post_id + "\"") != std::string::npos;
  for (const auto& a : run.corpus.accounts) {
    leaks += exported.find("\"" + a.user_id + "\"") != std::string::npos;
    leaks += exported.find(a.username) != std::string::npos;
  }
  CHECK(leaks == 0);

  const auto map = parse_csv(read_file(out / "id_map.csv"));
  std::set<std::string> tokens;
  for (std::size_t i = 1; i < map.size(); ++i) tokens.insert(map[i][2]);
  CHECK(tokens.size() == map.size() - 1);

  // same secret, same tokens
  const auto first = read_file(out / "export" / "posts.jsonl");
  CHECK(cmd_export(run.config, {}) == kExitOk);
  CHECK(read_file(out / "export" / "posts.jsonl") == first);
  fs::remove_all(dir);
}

TEST_CASE("outputs do not depend on the thread count") {
  const std::set<std::string> names = {"cohort.jsonl", "evidence.jsonl", "removals.tsv", "review_candidates.tsv",
                                       "detect_summary.tsv", "profiles.jsonl", "age_review.tsv"};
  std::map<std::string, std::string> reference;
  for (unsigned threads : {1u, 3u, 8u}) {
    const auto dir = scratch("threads");
    synth_run::run_all(dir, 200, 9, threads);
    const auto snap = synth_run::snapshot(dir / "out", names);
    CHECK(snap.size() == names.size());
    if (reference.empty())
      reference = snap;
    else
      CHECK(snap == reference);
    fs::remove_all(dir);
  }
}

TEST_CASE("an empty cohort is not an error for detect but is for report") {
  const auto dir = scratch("empty");
  fs::remove_all(dir);
  write(dir / "posts.jsonl",
        R"({"id":"p1","author_id":"u1","body":"nothing to see","subreddit":"s","created_utc":1500000000})" "\n");
  write(dir / "srd.conf", "posts = posts.jsonl\npatterns = " SRD_RESOURCE_DIR "/patterns\noutput_dir = out\n");
  const auto cfg = load_config(dir / "srd.conf");
  CHECK(cmd_ingest(cfg, {}) == kExitOk);
  CHECK(cmd_detect(cfg, {}) == kExitOk);
  CHECK(read_file(dir / "out" / "cohort.jsonl").empty());
  CHECK(cmd_profile(cfg, {}) == kExitEmpty);
  CHECK(cmd_report(cfg, {}) == kExitEmpty);
  fs::remove_all(dir);
}

TEST_CASE("ingest of a corpus without valid posts reports empty") {
  const auto dir = scratch("noposts");
  fs::remove_all(dir);
  write(dir / "posts.jsonl", "not json\n");
  write(dir / "srd.conf", "posts = posts.jsonl\noutput_dir = out\n");
  CHECK(cmd_ingest(load_config(dir / "srd.conf"), {}) == kExitEmpty);
  fs::remove_all(dir);
}

TEST_CASE("configuration problems surface before any output is written") {
  const auto dir = scratch("config");
  fs::remove_all(dir);
  write(dir / "posts.jsonl", "");
  write(dir / "patterns" / "inclusion.txt", "i was diagnos*\n");
  write(dir / "patterns" / "exclusion.txt", "");
  write(dir / "patterns" / "doctor.txt", "doctor\n");
  write(dir / "patterns" / "conditions" / "MDD.txt", "depression\n");

  CHECK_THROWS_AS(cmd_ingest(parse_config("posts = posts.jsonl\n", dir), {}), ConfigError);
  CHECK_FALSE(fs::exists(dir / "out"));
  const auto no_bd = parse_config("posts = posts.jsonl\npatterns = patterns\noutput_dir = out\n", dir);
  CHECK_THROWS_AS(cmd_detect(no_bd, {}), ConfigError);
  CHECK_THROWS_AS(cmd_evaluate(no_bd, {}), ConfigError);  // no gold configured
  CHECK_THROWS_AS(cmd_export(no_bd, {}), ConfigError);    // no secret
  CHECK_FALSE(fs::exists(dir / "out"));
  fs::remove_all(dir);
}
