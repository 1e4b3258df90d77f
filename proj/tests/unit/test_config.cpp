#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "srd/config.hpp"
#include "srd/error.hpp"

using namespace srd;
namespace fs = std::filesystem;

TEST_CASE("parse_config reads keys and resolves relative paths") {
  const auto c = parse_config(
      "# comment\n"
      "posts = data/posts.jsonl\n"
      "output_dir = /abs/out\n"
      "threshold_chars = 40\n"
      "mdd_policy = conservative\n"
      "top_n = 3\n"
      "schema.body = text | selftext\n"
      "baseline.gender = base/gender.tsv\n"
      "gold_sampling = random sample of 100 users\n",
      "/etc/srd");
  CHECK(c.posts == fs::path("/etc/srd/data/posts.jsonl"));
  CHECK(c.output_dir == fs::path("/abs/out"));
  CHECK(c.threshold_chars == 40);
  CHECK(c.mdd_policy == MddPolicy::conservative);
  CHECK(c.top_n == 3);
  CHECK(c.schema.fields.at("body") == std::vector<std::string>{"text", "selftext"});
  CHECK(c.baselines.at("gender") == fs::path("/etc/srd/base/gender.tsv"));
  CHECK(c.gold_sampling == "random sample of 100 users");
}

TEST_CASE("defaults") {
  const auto c = parse_config("", "/x");
  CHECK(c.threshold_chars == 55);
  CHECK(c.mdd_policy == MddPolicy::plain);
  CHECK(c.top_n == 5);
  CHECK(c.schema.fields.at("post_id") == std::vector<std::string>{"id"});
}

TEST_CASE("parse_config errors are config errors") {
  for (const char* bad : {"no equals sign", "colour = blue", "threshold_chars = -3", "threshold_chars = 5x",
                          "mdd_policy = strict", "input_schema = csv", "baseline.bots = b.tsv", "posts = "})
    CHECK_THROWS_AS(parse_config(bad, "/x"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/srd.conf"), ConfigError);
}

TEST_CASE("validate_config") {
  const auto dir = fs::temp_directory_path() / "srd_test_config";
  fs::create_directories(dir);
  std::ofstream(dir / "posts.jsonl") << "";

  CHECK_THROWS_AS(validate_config(parse_config("posts = posts.jsonl\n", dir)), ConfigError);
  CHECK_NOTHROW(validate_config(parse_config("posts = posts.jsonl\noutput_dir = out\n", dir)));
  CHECK_THROWS_AS(validate_config(parse_config("output_dir = out\nthreshold_chars = 0\n", dir)), ConfigError);
  CHECK_THROWS_AS(validate_config(parse_config("output_dir = out\ngold = missing.csv\n", dir)), ConfigError);
  CHECK_THROWS_AS(validate_config(parse_config("output_dir = out\nbaseline.gender = missing.tsv\n", dir)),
                  ConfigError);
  CHECK_THROWS_AS(validate_config(parse_config("output_dir = out\nschema.body = |\n", dir)), ConfigError);

  std::ofstream(dir / "srd.conf") << "posts = posts.jsonl\noutput_dir = out\n";
  const auto loaded = load_config(dir / "srd.conf");
  CHECK(loaded.posts == dir / "posts.jsonl");
  fs::remove_all(dir);
}
