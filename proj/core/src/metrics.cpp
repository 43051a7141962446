#include "placemotif/metrics.hpp"

#include <cmath>
#include <ostream>

#include "csv.hpp"
#include "placemotif/error.hpp"

namespace placemotif {

BaselineTable compute_baseline(const DailySeries& series, DateRange window,
                               const BaselineOptions& options) {
  const int len = window.length();
  const bool ok = options.allow_other_multiples_of_7 ? (len > 0 && len % 7 == 0)
                                                     : len == 21;
  if (!ok) {
    throw Error(ErrorCode::InvalidArgument,
                "baseline window " + format_date(window.first) + ".." +
                    format_date(window.last) + " spans " + std::to_string(len) +
                    " days; expected " +
                    (options.allow_other_multiples_of_7 ? "a multiple of 7" : "21"));
  }

  BaselineTable table;
  table.metric = series.metric;
  std::array<double, 7> sum{};
  for (Date d : window.days()) {
    const unsigned wd = weekday_index(d);
    ++table.expected[wd];
    if (auto it = series.values.find(d); it != series.values.end()) {
      sum[wd] += it->second;
      ++table.samples[wd];
    }
  }
  for (int wd = 0; wd < 7; ++wd) {
    if (table.samples[wd] > 0) table.value[wd] = sum[wd] / table.samples[wd];
    if (table.samples[wd] != table.expected[wd]) table.complete = false;
  }
  return table;
}

const ChangePoint* ChangeSeries::at(Date d) const {
  for (const auto& p : points) {
    if (p.date == d) return &p;
  }
  return nullptr;
}

ChangeSeries pct_change(const DailySeries& series, const BaselineTable& baseline,
                        DateRange study_window) {
  ChangeSeries out;
  out.metric = series.metric;
  for (Date d : study_window.days()) {
    ChangePoint p;
    p.date = d;
    if (auto it = series.values.find(d); it != series.values.end()) p.value = it->second;
    p.baseline = baseline.for_date(d);
    if (p.value && p.baseline && *p.baseline != 0.0 && std::isfinite(*p.baseline)) {
      p.change = (*p.value - *p.baseline) / *p.baseline;
    }
    out.points.push_back(p);
  }
  return out;
}

Impact max_impact(const ChangeSeries& change, DateRange event_window) {
  std::optional<Impact> best;
  for (const auto& p : change.points) {
    if (!p.defined() || !event_window.contains(p.date)) continue;
    if (!best || std::abs(*p.change) > std::abs(best->change)) {
      best = Impact{*p.change, p.date};
    }
  }
  if (!best) {
    throw Error(ErrorCode::Undefined,
                "no defined change for '" + change.metric + "' in " +
                    format_date(event_window.first) + ".." +
                    format_date(event_window.last));
  }
  return *best;
}

RecoveryReport recovery_duration(const ChangeSeries& change,
                                 const RecoveryOptions& options) {
  RecoveryReport report;
  report.metric = change.metric;
  if (options.consecutive < 1) {
    throw Error(ErrorCode::InvalidArgument, "consecutive must be at least 1");
  }
  int run = 0;
  std::optional<Date> previous;
  for (const auto& p : change.points) {
    if (p.date < options.post_start) continue;
    const bool contiguous = previous && (p.date - *previous).count() == 1;
    previous = p.date;
    if (!p.defined() || std::abs(*p.change) > options.threshold) {
      run = 0;
      continue;
    }
    run = contiguous ? run + 1 : 1;
    if (run >= options.consecutive) {
      report.cutoff = p.date;
      report.recovery_days = days_between(options.event_start, p.date);
      break;
    }
  }
  return report;
}

RecoveryReport summarize(const ChangeSeries& change, DateRange event_window,
                         const RecoveryOptions& options) {
  RecoveryReport report = recovery_duration(change, options);
  try {
    report.max_impact = max_impact(change, event_window);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Undefined) throw;
  }
  return report;
}

void write_change_csv(std::ostream& out, std::span<const ChangeSeries> series,
                      bool with_header) {
  if (with_header) out << "metric,date,value,baseline,change,defined\n";
  const auto opt = [](const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
  };
  for (const auto& s : series) {
    const auto metric = csv::escape(s.metric);
    for (const auto& p : s.points) {
      out << metric << ',' << format_date(p.date) << ',' << opt(p.value) << ','
          << opt(p.baseline) << ',' << opt(p.change) << ','
          << (p.defined() ? "true" : "false") << '\n';
    }
  }
}

void write_recovery_csv(std::ostream& out, std::span<const RecoveryReport> reports,
                        bool with_header) {
  if (with_header) out << "metric,max_impact,impact_date,recovery_days,cutoff_date\n";
  for (const auto& r : reports) {
    out << csv::escape(r.metric) << ',';
    if (r.max_impact) {
      out << csv::format_double(r.max_impact->change) << ','
          << format_date(r.max_impact->date);
    } else {
      out << ',';
    }
    out << ',';
    if (r.recovered()) {
      out << *r.recovery_days << ',' << format_date(*r.cutoff);
    } else {
      out << "not_recovered,";
    }
    out << '\n';
  }
}

}  // namespace placemotif
