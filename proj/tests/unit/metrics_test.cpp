#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "placemotif/error.hpp"
#include "placemotif/metrics.hpp"

namespace pm = placemotif;

namespace {

const pm::DateRange kBaseline = pm::parse_date_range("2021-08-01", "2021-08-21");
const pm::DateRange kStudy = pm::parse_date_range("2021-08-22", "2021-09-30");
const pm::DateRange kEvent = pm::parse_date_range("2021-08-26", "2021-09-02");
const pm::Date kEventStart = pm::parse_date("2021-08-26");
const pm::Date kPostStart = pm::parse_date("2021-09-02");

pm::Date day(const char* text) { return pm::parse_date(text); }

// Change series over the study window: 0.5 everywhere except `quiet` dates.
pm::ChangeSeries changes(std::initializer_list<const char*> quiet, double loud = 0.5) {
  pm::ChangeSeries s{"m", {}};
  for (auto d : kStudy.days()) s.points.push_back({d, 1.0, 1.0, loud});
  for (const char* q : quiet)
    for (auto& p : s.points)
      if (p.date == day(q)) p.change = 0.01;
  return s;
}

pm::RecoveryOptions options(double threshold = 0.05) {
  return {kEventStart, kPostStart, threshold, 2};
}

}  // namespace

TEST(Baseline, ConstantSeries) {
  pm::DailySeries s{"c", {}};
  for (auto d : pm::parse_date_range("2021-08-01", "2021-09-30").days()) s.values[d] = 10.0;
  const auto b = pm::compute_baseline(s, kBaseline);
  for (const auto& v : b.value) EXPECT_EQ(v, 10.0);
  EXPECT_TRUE(b.complete);
  const auto c = pm::pct_change(s, b, kStudy);
  ASSERT_EQ(c.points.size(), 40u);
  for (const auto& p : c.points) EXPECT_EQ(p.change, 0.0);
}

TEST(Baseline, ThreeSamplesPerWeekday) {
  const auto b = pm::compute_baseline({"x", {}}, kBaseline);
  for (int wd = 0; wd < 7; ++wd) EXPECT_EQ(b.expected[wd], 3);
  EXPECT_FALSE(b.complete);
}

TEST(Baseline, SundayMean) {
  pm::DailySeries s{"x", {{day("2021-08-01"), 1}, {day("2021-08-08"), 2}, {day("2021-08-15"), 3}}};
  const auto b = pm::compute_baseline(s, kBaseline);
  EXPECT_EQ(b.value[0], 2.0);
  EXPECT_EQ(b.samples[0], 3);
  EXPECT_FALSE(b.value[1]);
}

TEST(Baseline, MissingValueKeepsMeanOfPresent) {
  pm::DailySeries s{"x", {{day("2021-08-02"), 4}, {day("2021-08-16"), 8}}};
  const auto b = pm::compute_baseline(s, kBaseline);
  EXPECT_EQ(b.value[1], 6.0);
  EXPECT_EQ(b.samples[1], 2);
  EXPECT_FALSE(b.complete);
}

TEST(Baseline, WindowLength) {
  EXPECT_THROW(pm::compute_baseline({"x", {}}, pm::parse_date_range("2021-08-01", "2021-08-20")),
               pm::Error);
  EXPECT_THROW(pm::compute_baseline({"x", {}}, pm::parse_date_range("2021-08-01", "2021-08-14")),
               pm::Error);
  EXPECT_NO_THROW(pm::compute_baseline({"x", {}}, pm::parse_date_range("2021-08-01", "2021-08-14"),
                                       {true}));
}

TEST(PctChange, Arithmetic) {
  pm::BaselineTable b;
  b.value.fill(10.0);
  pm::DailySeries s{"x", {{day("2021-08-22"), 15}, {day("2021-08-23"), 10}, {day("2021-08-24"), 6}}};
  const auto c = pm::pct_change(s, b, pm::parse_date_range("2021-08-22", "2021-08-25"));
  EXPECT_DOUBLE_EQ(*c.points[0].change, 0.5);
  EXPECT_DOUBLE_EQ(*c.points[1].change, 0.0);
  EXPECT_DOUBLE_EQ(*c.points[2].change, -0.4);
  EXPECT_FALSE(c.points[3].defined());
}

TEST(PctChange, ZeroBaselineUndefined) {
  pm::BaselineTable b;
  b.value.fill(0.0);
  pm::DailySeries s{"x", {{day("2021-08-22"), 3}}};
  const auto c = pm::pct_change(s, b, pm::parse_date_range("2021-08-22", "2021-08-22"));
  EXPECT_FALSE(c.points[0].defined());
  EXPECT_EQ(c.points[0].value, 3.0);
}

TEST(PctChange, ScaleEquivariant) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> v(1.0, 100.0);
  pm::DailySeries s{"x", {}};
  for (auto d : pm::parse_date_range("2021-08-01", "2021-09-30").days()) s.values[d] = v(rng);
  const auto base = pm::pct_change(s, pm::compute_baseline(s, kBaseline), kStudy);
  for (double k : {0.5, 2.0, 10.0, 1e-3, 7.25}) {
    pm::DailySeries scaled = s;
    for (auto& [d, value] : scaled.values) value *= k;
    const auto c = pm::pct_change(scaled, pm::compute_baseline(scaled, kBaseline), kStudy);
    for (std::size_t i = 0; i < c.points.size(); ++i)
      EXPECT_NEAR(*c.points[i].change, *base.points[i].change, 1e-12);
  }
}

TEST(MaxImpact, Examples) {
  pm::ChangeSeries s{"x", {}};
  s.points.push_back({day("2021-08-27"), {}, {}, -0.1});
  s.points.push_back({day("2021-08-28"), {}, {}, -0.3206});
  s.points.push_back({day("2021-08-29"), {}, {}, 0.2});
  s.points.push_back({day("2021-09-05"), {}, {}, -0.9});  // outside window
  const auto m = pm::max_impact(s, kEvent);
  EXPECT_EQ(m.change, -0.3206);
  EXPECT_EQ(m.date, day("2021-08-28"));

  pm::ChangeSeries one{"y", {{day("2021-08-30"), {}, {}, 0.4}}};
  EXPECT_EQ(pm::max_impact(one, kEvent).change, 0.4);
  EXPECT_EQ(pm::max_impact(one, kEvent).date, day("2021-08-30"));

  pm::ChangeSeries none{"z", {{day("2021-08-30"), {}, {}, {}}}};
  EXPECT_THROW(pm::max_impact(none, kEvent), pm::Error);
}

TEST(MaxImpact, HealthcareShape) {
  pm::ChangeSeries s{"freq:healthcare", {}};
  for (auto d : kStudy.days()) {
    const int offset = pm::days_between(day("2021-08-29"), d);
    s.points.push_back({d, {}, {}, -0.3205 + 0.03 * std::abs(offset)});
  }
  const auto m = pm::max_impact(s, kEvent);
  EXPECT_DOUBLE_EQ(m.change, -0.3205);
  EXPECT_EQ(m.date, day("2021-08-29"));
}

TEST(MaxImpact, TiesGoToEarliestDate) {
  pm::ChangeSeries s{"x", {{day("2021-08-27"), {}, {}, 0.3}, {day("2021-08-28"), {}, {}, -0.3}}};
  EXPECT_EQ(pm::max_impact(s, kEvent).date, day("2021-08-27"));
}

TEST(MaxImpact, DominatesEveryDefinedPoint) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.3);
  for (int round = 0; round < 50; ++round) {
    pm::ChangeSeries s{"x", {}};
    for (auto d : kStudy.days()) s.points.push_back({d, {}, {}, n(rng)});
    const auto m = pm::max_impact(s, kEvent);
    EXPECT_TRUE(kEvent.contains(m.date));
    for (const auto& p : s.points)
      if (kEvent.contains(p.date)) {
        EXPECT_GE(std::abs(m.change), std::abs(*p.change));
      }
  }
}

TEST(Recovery, PublishedRuleOutcomes) {
  const auto r = pm::recovery_duration(changes({"2021-09-02", "2021-09-03"}), options());
  EXPECT_EQ(r.cutoff, day("2021-09-03"));
  EXPECT_EQ(r.recovery_days, 8);
  EXPECT_EQ(pm::recovery_duration(changes({"2021-09-04", "2021-09-05"}), options()).recovery_days, 10);
  EXPECT_EQ(pm::recovery_duration(changes({"2021-09-05", "2021-09-06"}), options()).recovery_days, 11);
  EXPECT_EQ(pm::recovery_duration(changes({"2021-09-06", "2021-09-07"}), options()).recovery_days, 12);
  EXPECT_EQ(pm::recovery_duration(changes({"2021-09-11", "2021-09-12"}), options()).recovery_days, 17);
}

TEST(Recovery, NeverWithinThreshold) {
  const auto r = pm::recovery_duration(changes({}, 0.06), options());
  EXPECT_FALSE(r.recovered());
  EXPECT_FALSE(r.recovery_days);
}

TEST(Recovery, IsolatedQuietDaysDoNotCount) {
  const auto r = pm::recovery_duration(changes({"2021-09-03", "2021-09-05", "2021-09-08", "2021-09-09"}),
                                       options());
  EXPECT_EQ(r.cutoff, day("2021-09-09"));
}

TEST(Recovery, PreEventQuietDaysIgnored) {
  const auto r = pm::recovery_duration(changes({"2021-08-30", "2021-08-31", "2021-09-06", "2021-09-07"}),
                                       options());
  EXPECT_EQ(r.cutoff, day("2021-09-07"));
}

TEST(Recovery, GapsAndUndefinedBreakRuns) {
  auto s = changes({"2021-09-03", "2021-09-04", "2021-09-05", "2021-09-06"});
  // Undefined on Sep 4 and a missing Sep 6.
  for (auto& p : s.points)
    if (p.date == day("2021-09-04")) p.change.reset();
  std::erase_if(s.points, [](const pm::ChangePoint& p) { return p.date == day("2021-09-06"); });
  EXPECT_FALSE(pm::recovery_duration(s, options()).recovered());
}

TEST(Recovery, BaselineRepeatRecoversImmediately) {
  pm::DailySeries s{"x", {}};
  const double weekday_value[7] = {3, 5, 8, 13, 21, 34, 55};
  for (auto d : pm::parse_date_range("2021-08-01", "2021-09-30").days())
    s.values[d] = weekday_value[pm::weekday_index(d)];
  const auto c = pm::pct_change(s, pm::compute_baseline(s, kBaseline), kStudy);
  const auto r = pm::recovery_duration(c, options());
  EXPECT_EQ(r.cutoff, day("2021-09-03"));
  EXPECT_EQ(r.recovery_days, 8);
}

TEST(Recovery, MonotoneInThreshold) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 0.08);
  for (int round = 0; round < 100; ++round) {
    pm::ChangeSeries s{"x", {}};
    for (auto d : kStudy.days()) s.points.push_back({d, {}, {}, n(rng)});
    std::optional<pm::Date> previous;
    for (double t : {0.01, 0.03, 0.05, 0.08, 0.12, 0.2}) {
      const auto r = pm::recovery_duration(s, options(t));
      if (previous) {
        ASSERT_TRUE(r.cutoff);
        EXPECT_LE(*r.cutoff, *previous);
      }
      if (r.cutoff) previous = r.cutoff;
    }
  }
}

TEST(MetricsExport, Csv) {
  const std::array<pm::ChangeSeries, 1> series{changes({"2021-09-02", "2021-09-03"})};
  std::ostringstream change_out, recovery_out;
  pm::write_change_csv(change_out, series);
  EXPECT_EQ(change_out.str().substr(0, change_out.str().find('\n')),
            "metric,date,value,baseline,change,defined");
  const std::array<pm::RecoveryReport, 2> reports{
      pm::summarize(series[0], kEvent, options()),
      pm::summarize(changes({}, 0.06), kEvent, options())};
  pm::write_recovery_csv(recovery_out, reports);
  const auto text = recovery_out.str();
  EXPECT_NE(text.find("metric,max_impact,impact_date,recovery_days,cutoff_date\n"), std::string::npos);
  EXPECT_NE(text.find(",8,2021-09-03"), std::string::npos);
  EXPECT_NE(text.find("not_recovered"), std::string::npos);
}
