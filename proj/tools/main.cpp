#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "placemotif/pipeline.hpp"
#include "placemotif/synth.hpp"

namespace pm = placemotif;

namespace {

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kStage = 3 };

int exit_code(pm::ErrorCode code) {
  switch (code) {
    case pm::ErrorCode::Config: return kConfig;
    case pm::ErrorCode::Io: return kIo;
    default: return kStage;
  }
}

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::string> convention;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Pipeline config (JSON)")->required();
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--m4-convention", o.convention, "k4-first or diamond-first")
      ->check(CLI::IsMember({"k4-first", "diamond-first"}));
}

pm::PipelineConfig load_config(const Overrides& o) {
  pm::PipelineConfig config;
  try {
    config = pm::PipelineConfig::load(o.config);
  } catch (const pm::Error& e) {
    throw pm::Error(pm::ErrorCode::Config, e.what());
  }
  if (o.out) config.output = *o.out;
  if (o.seed) {
    config.seed = *o.seed;
    if (config.synth) config.synth->seed = *o.seed;
  }
  if (o.jobs) config.jobs = *o.jobs;
  if (o.convention) config.convention = *pm::parse_convention(*o.convention);
  return config;
}

int run_synth(const Overrides& o) {
  auto config = load_config(o);
  pm::ScenarioConfig scenario = config.synth.value_or(pm::ScenarioConfig{});
  if (o.seed) scenario.seed = *o.seed;
  const auto categories = pm::CategoryTable::defaults();
  const auto generated = pm::generate_scenario(scenario, categories, config.jobs);
  pm::write_scenario(config.output, generated, scenario, categories);
  std::printf("wrote %zu stops and %zu POIs to %s\n", generated.stops.size(),
              generated.layout.pois.size(), config.output.string().c_str());
  return kOk;
}

int run_stages(const Overrides& o, const pm::StageSelection& stages) {
  const auto config = load_config(o);
  const auto result = pm::run_pipeline(config, stages);
  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("bundle written to %s (%zu days)\n", config.output.string().c_str(),
              result.networks.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Daily place-network motif analysis"};
  app.set_version_flag("--version", std::string(PLACEMOTIF_CLI_VERSION));
  app.require_subcommand(1);

  Overrides o;
  struct Command {
    const char* name;
    const char* help;
    std::optional<pm::StageSelection> stages;  // unset: synth
  };
  const Command commands[] = {
      {"synth", "Generate a synthetic scenario (stops, POIs, ground truth)", std::nullopt},
      {"ingest", "Build daily networks and mobility counts", pm::StageSelection{false, false, false, false}},
      {"census", "Count motifs per day", pm::StageSelection{true, false, false, false}},
      {"props", "Global network properties per day", pm::StageSelection{false, true, false, false}},
      {"metrics", "Baseline changes and recovery of motif series", pm::StageSelection{true, false, true, false}},
      {"clusters", "Rank attributed motifs and build cluster series", pm::StageSelection{true, false, false, true}},
      {"run", "Run every stage and write the full bundle", pm::StageSelection::all()},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    for (const auto& c : commands) {
      if (!app.got_subcommand(c.name)) continue;
      return c.stages ? run_stages(o, *c.stages) : run_synth(o);
    }
  } catch (const pm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kStage;
  }
  return kConfig;
}
