// srd: self-reported diagnosis cohort pipeline.
#include <CLI11.hpp>

#include <iostream>

#include "srd/error.hpp"
#include "srd/pipeline.hpp"
#include "srd/synth.hpp"

#ifndef SRD_RESOURCE_DIR
#define SRD_RESOURCE_DIR "resources"
#endif
#ifndef SRD_DATA_DIR
#define SRD_DATA_DIR "data"
#endif

namespace {

int run(int argc, char** argv) {
  CLI::App app{"Self-reported diagnosis cohort pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  bool quiet = false;
  app.add_option("--config", config_path, "pipeline config file");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", seed, "seed for synthetic fixtures");
  app.add_flag("-q,--quiet", quiet, "no progress lines");

  using Command = int (*)(const srd::PipelineConfig&, const srd::RunOptions&);
  const std::pair<const char*, Command> stages[] = {
      {"ingest", srd::cmd_ingest},     {"detect", srd::cmd_detect}, {"profile", srd::cmd_profile},
      {"evaluate", srd::cmd_evaluate}, {"report", srd::cmd_report}, {"export", srd::cmd_export}};
  const char* help[] = {"validate posts/accounts into the corpus store",
                        "find self-reported diagnoses and build the cohort",
                        "infer age, gender and country for cohort members",
                        "score every method against gold annotations",
                        "write the report tables",
                        "write a pseudonymized copy of the corpus"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(stages); ++i) subs.push_back(app.add_subcommand(stages[i].first, help[i]));

  std::size_t synth_users = 500;
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus with planted ground truth");
  synth->add_option("dir", synth_dir, "output directory")->required();
  synth->add_option("--users", synth_users, "number of users")->check(CLI::Range(100, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? srd::kExitOk : srd::kExitConfig;
  }

  srd::RunOptions options;
  options.threads = threads;
  options.log = quiet ? nullptr : &std::cerr;

  if (synth->parsed()) {
    srd::SynthOptions so;
    so.n_users = synth_users;
    so.seed = seed;
    const auto cells = srd::read_grid_cells(std::string(SRD_DATA_DIR) + "/country_grid.csv");
    srd::write_synth(synth_dir, srd::generate_synth(so, cells), std::string(SRD_RESOURCE_DIR) + "/patterns",
                     std::string(SRD_DATA_DIR) + "/country_grid.csv");
    return srd::kExitOk;
  }
  if (config_path.empty()) throw srd::ConfigError("--config is required");
  const auto config = srd::load_config(config_path);
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) return stages[i].second(config, options);
  return srd::kExitConfig;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const srd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return srd::kExitConfig;
  } catch (const srd::ParseError& e) {
    std::cerr << "data error (line " << e.line() << "): " << e.what() << '\n';
    return srd::kExitData;
  } catch (const srd::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return srd::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return srd::kExitData;
  }
}
