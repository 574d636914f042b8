#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cgbench/bench.hpp"

namespace cgbench {
namespace {

BenchTarget in_process(std::function<void(const std::string&)> fn) {
  BenchTarget t;
  t.id = "test";
  t.fn = std::move(fn);
  return t;
}

// ---------------------------------------------------------------------------
// in-process targets
// ---------------------------------------------------------------------------

TEST(InProcess, MeasuresWallTimeAndMemory) {
  BenchTarget t = in_process([](const std::string&) {
    volatile double x = 0;
    for (int i = 0; i < 2000000; ++i) x = x + std::sqrt(double(i));
  });
  std::vector<BenchReport> reports = run_benchmark(t, {"in"}, 3, 10);
  ASSERT_EQ(reports.size(), 1u);
  const BenchReport& r = reports[0];
  EXPECT_EQ(r.target, "test");
  EXPECT_EQ(r.input, "in");
  ASSERT_EQ(r.runs.size(), 3u);
  EXPECT_EQ(r.failed_runs, 0);
  for (const BenchRun& run : r.runs) {
    EXPECT_FALSE(run.failed);
    EXPECT_GT(run.wall_seconds, 0.0);
    EXPECT_GT(run.peak_rss_mb, 0.0);  // the process itself is resident
    EXPECT_GE(run.samples.size(), 2u);  // bracketing samples at least
    EXPECT_EQ(run.samples.front().t_ms, 0);
  }
  EXPECT_GT(r.mean_wall_seconds, 0.0);
}

TEST(InProcess, RunNumbersAreOneBased) {
  std::vector<BenchReport> reports =
      run_benchmark(in_process([](const std::string&) {}), {"x"}, 4, 10);
  for (size_t i = 0; i < reports[0].runs.size(); ++i)
    EXPECT_EQ(reports[0].runs[i].run, static_cast<int>(i) + 1);
}

TEST(InProcess, ThrowingRunsAreRecordedNotAveraged) {
  int counter = 0;
  BenchTarget t = in_process([&counter](const std::string&) {
    if (++counter == 1) throw std::runtime_error("cold start");
  });
  std::vector<BenchReport> reports = run_benchmark(t, {"x"}, 3, 10);
  const BenchReport& r = reports[0];
  EXPECT_EQ(r.failed_runs, 1);
  EXPECT_TRUE(r.runs[0].failed);
  EXPECT_NE(r.runs[0].exit_status, 0);
  EXPECT_FALSE(r.runs[1].failed);

  double wall = 0.0, peak = 0.0;
  for (const BenchRun& run : r.runs)
    if (!run.failed) {
      wall += run.wall_seconds;
      peak += run.peak_rss_mb;
    }
  EXPECT_NEAR(r.mean_wall_seconds, wall / 2.0, 1e-9);
  EXPECT_NEAR(r.mean_peak_rss_mb, peak / 2.0, 1e-9);
}

TEST(InProcess, EachInputGetsItsOwnReport) {
  std::vector<BenchReport> reports =
      run_benchmark(in_process([](const std::string&) {}), {"a", "b"}, 2, 10);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].input, "a");
  EXPECT_EQ(reports[1].input, "b");
}

// ---------------------------------------------------------------------------
// command targets
// ---------------------------------------------------------------------------

TEST(Command, TrueSucceedsAndFalseFails) {
  BenchTarget ok;
  ok.id = "ok";
  ok.command = "true";
  std::vector<BenchReport> good = run_benchmark(ok, {"x"}, 2, 10);
  EXPECT_EQ(good[0].failed_runs, 0);

  BenchTarget bad;
  bad.id = "bad";
  bad.command = "false";
  std::vector<BenchReport> failed = run_benchmark(bad, {"x"}, 2, 10);
  EXPECT_EQ(failed[0].failed_runs, 2);
  EXPECT_EQ(failed[0].runs[0].exit_status, 1);
  EXPECT_EQ(failed[0].mean_wall_seconds, 0.0);  // nothing succeeded
}

TEST(Command, MissingBinariesReportTheShellExitCode) {
  BenchTarget t;
  t.id = "gone";
  t.command = "/no/such/binary-at-all";
  std::vector<BenchReport> reports = run_benchmark(t, {"x"}, 1, 10);
  ASSERT_EQ(reports[0].runs.size(), 1u);
  EXPECT_TRUE(reports[0].runs[0].failed);
  EXPECT_EQ(reports[0].runs[0].exit_status, 127);
}

TEST(Command, InputPlaceholderIsSubstituted) {
  BenchTarget t;
  t.id = "stat";
  t.command = "test -e {}";
  EXPECT_EQ(run_benchmark(t, {"/etc/hostname"}, 1, 10)[0].failed_runs, 0);
  EXPECT_EQ(run_benchmark(t, {"/definitely missing"}, 1, 10)[0].failed_runs, 1);
}

TEST(Command, SleepShowsUpInWallTimeAndSamples) {
  BenchTarget t;
  t.id = "sleep";
  t.command = "sleep";  // input doubles as the duration argument
  std::vector<BenchReport> reports = run_benchmark(t, {"0.15"}, 1, 20);
  const BenchRun& run = reports[0].runs[0];
  EXPECT_GE(run.wall_seconds, 0.1);
  EXPECT_GE(run.samples.size(), 3u);
}

// ---------------------------------------------------------------------------
// parameter validation and rendering
// ---------------------------------------------------------------------------

TEST(BenchArgs, BadParametersAreUsageErrors) {
  BenchTarget t = in_process([](const std::string&) {});
  EXPECT_THROW(run_benchmark(t, {"x"}, 0, 10), Error);
  EXPECT_THROW(run_benchmark(t, {"x"}, 1, 5), Error);
  EXPECT_THROW(run_benchmark(BenchTarget{"empty", "", nullptr}, {"x"}, 1, 10),
               Error);
}

TEST(BenchCsv, OneRowPerRunWithTheFixedHeader) {
  std::vector<BenchReport> reports =
      run_benchmark(in_process([](const std::string&) {}), {"a", "b"}, 3, 10);
  std::string csv = bench_csv(reports);
  std::istringstream in(csv);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "target,input,run,wall_seconds,peak_rss_mb");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    // five comma-separated fields, numeric tail
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    size_t last = line.rfind(',');
    EXPECT_NO_THROW(std::stod(line.substr(last + 1)));
  }
  EXPECT_EQ(rows, 6);
}

TEST(BenchCsv, SampleTracesRender) {
  std::vector<BenchReport> reports =
      run_benchmark(in_process([](const std::string&) {}), {"a"}, 1, 10);
  std::string csv = samples_csv(reports[0].runs[0]);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t_ms,rss_mb");
  EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 1);
}

}  // namespace
}  // namespace cgbench
