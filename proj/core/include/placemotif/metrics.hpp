#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "placemotif/calendar.hpp"

namespace placemotif {

/// Daily values of one metric; dates may be missing.
struct DailySeries {
  std::string metric;
  std::map<Date, double> values;
};

/// One baseline value per weekday (Sunday = 0).
struct BaselineTable {
  std::string metric;
  std::array<std::optional<double>, 7> value{};
  std::array<int, 7> samples{};
  std::array<int, 7> expected{};
  /// False when any weekday is missing a value from the window.
  bool complete = true;

  std::optional<double> for_date(Date d) const { return value[weekday_index(d)]; }
};

struct BaselineOptions {
  /// Permit any window whose length is a multiple of 7 instead of exactly 21.
  bool allow_other_multiples_of_7 = false;
};

/// Weekday means over `window`. Throws Error(InvalidArgument) unless the
/// window is 21 consecutive days (or a multiple of 7 with the override).
BaselineTable compute_baseline(const DailySeries& series, DateRange window,
                               const BaselineOptions& options = {});

struct ChangePoint {
  Date date{};
  std::optional<double> value;
  std::optional<double> baseline;
  /// (value - baseline) / baseline; unset for missing values and zero
  /// baselines.
  std::optional<double> change;

  bool defined() const { return change.has_value(); }
};

struct ChangeSeries {
  std::string metric;
  std::vector<ChangePoint> points;  // one per study-window date, ascending

  const ChangePoint* at(Date d) const;
};

ChangeSeries pct_change(const DailySeries& series, const BaselineTable& baseline,
                        DateRange study_window);

struct Impact {
  double change = 0.0;
  Date date{};
};

/// Signed change with the largest magnitude inside `event_window`; earliest
/// date wins ties. Throws Error(Undefined) if no defined point falls inside.
Impact max_impact(const ChangeSeries& change, DateRange event_window);

struct RecoveryOptions {
  Date event_start{};
  Date post_start{};
  double threshold = 0.05;
  int consecutive = 2;
};

struct RecoveryReport {
  std::string metric;
  std::optional<Impact> max_impact;
  /// Last day of the first qualifying run; unset when not recovered.
  std::optional<Date> cutoff;
  std::optional<int> recovery_days;

  bool recovered() const { return cutoff.has_value(); }
};

/// First run of `consecutive` calendar days on or after post_start with
/// |change| <= threshold. Missing or undefined days break a run.
RecoveryReport recovery_duration(const ChangeSeries& change,
                                 const RecoveryOptions& options);

/// Impact plus recovery in one report; the impact is left unset when the
/// event window has no defined change.
RecoveryReport summarize(const ChangeSeries& change, DateRange event_window,
                         const RecoveryOptions& options);

/// `metric,date,value,baseline,change,defined`
void write_change_csv(std::ostream& out, std::span<const ChangeSeries> series,
                      bool with_header = true);
/// `metric,max_impact,impact_date,recovery_days,cutoff_date`; recovery_days
/// reads `not_recovered` when no cutoff was found.
void write_recovery_csv(std::ostream& out, std::span<const RecoveryReport> reports,
                        bool with_header = true);

}  // namespace placemotif
