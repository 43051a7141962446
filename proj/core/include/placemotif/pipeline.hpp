#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "placemotif/calendar.hpp"
#include "placemotif/categories.hpp"
#include "placemotif/census.hpp"
#include "placemotif/error.hpp"
#include "placemotif/lifestyle.hpp"
#include "placemotif/metrics.hpp"
#include "placemotif/motif.hpp"
#include "placemotif/netprops.hpp"
#include "placemotif/network.hpp"
#include "placemotif/synth.hpp"

namespace placemotif {

struct PipelineConfig {
  std::filesystem::path stops;
  std::filesystem::path pois;
  std::filesystem::path categories;  // empty: built-in table
  std::filesystem::path rules;       // empty: built-in cluster rules
  std::filesystem::path output = "placemotif-out";

  int utc_offset_minutes = -5 * 60;
  std::int64_t min_dwell_seconds = kDefaultMinDwellSeconds;
  std::optional<std::int64_t> max_gap_seconds;

  DateRange baseline{parse_date("2021-08-01"), parse_date("2021-08-21")};
  DateRange study{parse_date("2021-08-22"), parse_date("2021-09-30")};
  DateRange event{parse_date("2021-08-26"), parse_date("2021-09-02")};
  Date post_start = parse_date("2021-09-02");
  double recovery_threshold = 0.05;
  int recovery_consecutive = 2;
  bool allow_nonstandard_baseline = false;

  M4Convention convention = M4Convention::CompleteFirst;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  std::size_t top_k = 10;
  std::optional<std::uint64_t> max_instances;

  /// Scenario used by the `synth` subcommand.
  std::optional<ScenarioConfig> synth;

  /// Baseline start through study end.
  DateRange calendar() const { return {baseline.first, study.last}; }

  /// Throws Error(Config) describing the first inconsistency.
  void validate() const;

  /// Relative paths are resolved against `base_dir`.
  static PipelineConfig from_json(std::string_view text,
                                  const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);
  /// Canonical form; `output` and `jobs` are left out since they do not
  /// affect results.
  std::string to_json() const;
};

enum class Stage { Ingest, Network, Census, Props, Metrics, Clusters, Report };
std::string_view stage_name(Stage s);

/// Failure inside one pipeline stage. Keeps the underlying error code.
class StageError : public Error {
 public:
  StageError(Stage stage, ErrorCode code, const std::string& what)
      : Error(code, std::string(stage_name(stage)) + ": " + what), stage_(stage) {}

  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Which stages a subcommand runs; ingest and network always run.
struct StageSelection {
  bool census = true;
  bool props = true;
  bool metrics = true;
  bool clusters = true;

  static StageSelection all() { return {}; }
  static StageSelection ingest_only() { return {false, false, false, false}; }
};

struct RunResult {
  std::vector<PlaceNetwork> networks;
  std::vector<MobilityStats> mobility;
  std::vector<DailyCensus> censuses;
  std::vector<GlobalProps> props;
  std::vector<ChangeSeries> mobility_changes;
  std::vector<RecoveryReport> mobility_recovery;
  std::vector<ChangeSeries> class_changes;
  std::vector<RecoveryReport> class_recovery;
  std::vector<ChangeSeries> key_changes;
  std::vector<RecoveryReport> key_recovery;
  std::optional<RankedAttributed> ranking;
  std::optional<ClusterAssignment> assignment;
  std::vector<ClusterRule> rules;
  std::vector<ClusterSeries> clusters;
  std::vector<ChangeSeries> cluster_changes;
  std::vector<RecoveryReport> cluster_recovery;
  std::vector<std::string> warnings;
};

/// Runs the selected stages in memory.
RunResult compute_pipeline(const PipelineConfig& config,
                           const StageSelection& stages = StageSelection::all());

enum class ReportFormat { Csv, Json };

/// CSV writes one file per table; JSON writes `recovery.json`.
void export_report(const RunResult& result, const PipelineConfig& config, ReportFormat format,
                   const std::filesystem::path& dir);

/// Runs the stages and writes the bundle into config.output. An
/// `_INCOMPLETE` marker stays in the directory unless every file was written.
RunResult run_pipeline(const PipelineConfig& config,
                       const StageSelection& stages = StageSelection::all());

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace placemotif
