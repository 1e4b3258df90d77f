#include "srd/config.hpp"

#include <charconv>

#include "srd/error.hpp"
#include "srd/io.hpp"
#include "srd/text.hpp"

namespace srd {

namespace fs = std::filesystem;

namespace {

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("config key '" + std::string(key) + "' expects a non-negative integer, got '" +
                      std::string(value) + "'");
  return v;
}

std::vector<std::string> split_alternatives(std::string_view value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    auto bar = value.find('|', pos);
    if (bar == std::string_view::npos) bar = value.size();
    const auto part = trim(value.substr(pos, bar - pos));
    if (!part.empty()) out.emplace_back(part);
    pos = bar + 1;
  }
  return out;
}

} // namespace

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  PipelineConfig c;
  c.config_dir = base_dir;
  std::map<std::string, std::vector<std::string>> overrides;
  auto resolve = [&](std::string_view v) {
    fs::path p{std::string(v)};
    return p.is_absolute() ? p : (base_dir / p).lexically_normal();
  };
  const std::map<std::string, fs::path PipelineConfig::*> path_keys = {
      {"posts", &PipelineConfig::posts},
      {"accounts", &PipelineConfig::accounts},
      {"patterns", &PipelineConfig::patterns},
      {"predictions", &PipelineConfig::predictions},
      {"country_grid", &PipelineConfig::country_grid},
      {"gold", &PipelineConfig::gold},
      {"resolutions", &PipelineConfig::resolutions},
      {"review", &PipelineConfig::review},
      {"secret_file", &PipelineConfig::secret_file},
      {"output_dir", &PipelineConfig::output_dir},
  };

  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (auto it = path_keys.find(key); it != path_keys.end()) {
      if (value.empty()) throw ConfigError("config key '" + key + "' has an empty path");
      c.*(it->second) = resolve(value);
    } else if (key == "threshold_chars") {
      c.threshold_chars = parse_count(key, value);
    } else if (key == "top_n") {
      c.top_n = parse_count(key, value);
    } else if (key == "mdd_policy") {
      if (value == "plain")
        c.mdd_policy = MddPolicy::plain;
      else if (value == "conservative")
        c.mdd_policy = MddPolicy::conservative;
      else
        throw ConfigError("mdd_policy must be plain or conservative");
    } else if (key == "input_schema") {
      if (value == "pushshift")
        c.schema = SchemaMap::pushshift();
      else if (value == "canonical")
        c.schema = SchemaMap::canonical();
      else
        throw ConfigError("input_schema must be pushshift or canonical");
    } else if (key.starts_with("schema.")) {
      overrides[key.substr(7)] = split_alternatives(value);
    } else if (key.starts_with("baseline.")) {
      const auto report = key.substr(9);
      if (report != "comorbidity" && report != "age_groups" && report != "gender" && report != "countries")
        throw ConfigError("unknown baseline report '" + report + "'");
      c.baselines[report] = resolve(value);
    } else if (key == "gold_sampling") {
      c.gold_sampling = std::string(value);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  for (auto& [field, names] : overrides) c.schema.fields[field] = std::move(names);
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  auto dir = fs::absolute(path).parent_path();
  return parse_config(text, dir);
}

void validate_config(const PipelineConfig& c) {
  if (c.output_dir.empty()) throw ConfigError("config must set output_dir");
  if (c.threshold_chars < 1) throw ConfigError("threshold_chars must be >= 1");
  c.schema.validate();
  for (const auto* p : {&c.posts, &c.accounts, &c.patterns, &c.predictions, &c.country_grid, &c.gold,
                        &c.resolutions, &c.review, &c.secret_file})
    if (!p->empty() && !fs::exists(*p)) throw ConfigError("configured path does not exist: " + p->string());
  for (const auto& [report, p] : c.baselines)
    if (!fs::exists(p)) throw ConfigError("baseline file does not exist: " + p.string());
}

} // namespace srd
