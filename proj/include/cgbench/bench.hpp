#ifndef CGBENCH_BENCH_HPP
#define CGBENCH_BENCH_HPP

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cgbench/error.hpp"
#include "cgbench/io_util.hpp"

namespace cgbench {

struct BenchSample {
  long long t_ms = 0;
  double rss_mb = 0.0;
};

struct BenchRun {
  int run = 0;  // 1-based
  bool failed = false;
  int exit_status = 0;
  double wall_seconds = 0.0;
  double peak_rss_mb = 0.0;
  std::vector<BenchSample> samples;
};

/// All runs of one target on one input, with means over the successful runs.
struct BenchReport {
  std::string target;
  std::string input;
  std::vector<BenchRun> runs;
  double mean_wall_seconds = 0.0;
  double mean_peak_rss_mb = 0.0;
  int failed_runs = 0;
};

/// What to measure: either a shell command (run per input, "{}" replaced by
/// the input path) or an in-process callable that throws on failure.
struct BenchTarget {
  std::string id;
  std::string command;  // empty means in-process
  std::function<void(const std::string&)> fn;
};

namespace detail {

/// VmRSS of one process, in kB; 0 when unreadable (e.g. already gone).
inline long long vm_rss_kb(const std::string& status_path) {
  std::FILE* f = std::fopen(status_path.c_str(), "r");
  if (!f) return 0;
  char line[256];
  long long kb = 0;
  while (std::fgets(line, sizeof line, f)) {
    if (std::sscanf(line, "VmRSS: %lld", &kb) == 1) break;
  }
  std::fclose(f);
  return kb;
}

inline void collect_tree(pid_t pid, std::vector<pid_t>& out) {
  out.push_back(pid);
  std::string base = "/proc/" + std::to_string(pid) + "/task";
  std::string children_path = base + "/" + std::to_string(pid) + "/children";
  std::FILE* f = std::fopen(children_path.c_str(), "r");
  if (!f) return;
  long long child = 0;
  while (std::fscanf(f, "%lld", &child) == 1)
    collect_tree(static_cast<pid_t>(child), out);
  std::fclose(f);
}

/// Resident set of a whole process tree, in MB.
inline double tree_rss_mb(pid_t root) {
  std::vector<pid_t> pids;
  collect_tree(root, pids);
  long long kb = 0;
  for (pid_t p : pids)
    kb += vm_rss_kb("/proc/" + std::to_string(p) + "/status");
  return static_cast<double>(kb) / 1024.0;
}

inline double self_rss_mb() {
  return static_cast<double>(vm_rss_kb("/proc/self/status")) / 1024.0;
}

inline std::string substitute_input(const std::string& command,
                                    const std::string& input) {
  std::string quoted = "'";
  for (char c : input) {
    if (c == '\'')
      quoted += "'\\''";
    else
      quoted.push_back(c);
  }
  quoted += "'";
  size_t at = command.find("{}");
  if (at == std::string::npos) return command + " " + quoted;
  std::string out = command;
  do {
    out.replace(at, 2, quoted);
    at = out.find("{}", at + quoted.size());
  } while (at != std::string::npos);
  return out;
}

inline BenchRun run_command_once(const std::string& command,
                                 const std::string& input, int interval_ms) {
  BenchRun run;
  std::string full = substitute_input(command, input);
  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) throw Error(Errc::io_error, "fork failed");
  if (pid == 0) {
    execl("/bin/sh", "sh", "-c", full.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  int status = 0;
  for (;;) {
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    auto now = std::chrono::steady_clock::now();
    run.samples.push_back(
        {std::chrono::duration_cast<std::chrono::milliseconds>(now - start)
             .count(),
         tree_rss_mb(pid)});
    std::this_thread::sleep_for(std::chrono::milliseconds(interval_ms));
  }
  auto end = std::chrono::steady_clock::now();
  run.wall_seconds = std::chrono::duration<double>(end - start).count();
  if (WIFEXITED(status))
    run.exit_status = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    run.exit_status = 128 + WTERMSIG(status);
  else
    run.exit_status = -1;
  run.failed = run.exit_status != 0;
  for (const BenchSample& s : run.samples)
    run.peak_rss_mb = std::max(run.peak_rss_mb, s.rss_mb);
  return run;
}

inline BenchRun run_in_process_once(
    const std::function<void(const std::string&)>& fn, const std::string& input,
    int interval_ms) {
  BenchRun run;
  std::atomic<bool> done{false};
  std::vector<BenchSample> samples;
  auto start = std::chrono::steady_clock::now();
  // Bracketing samples on this thread guarantee a nonempty trace even when
  // the workload outpaces the sampler's first wakeup.
  run.samples.push_back({0, self_rss_mb()});
  std::thread sampler([&] {
    while (!done.load(std::memory_order_relaxed)) {
      std::this_thread::sleep_for(std::chrono::milliseconds(interval_ms));
      auto now = std::chrono::steady_clock::now();
      samples.push_back(
          {std::chrono::duration_cast<std::chrono::milliseconds>(now - start)
               .count(),
           self_rss_mb()});
    }
  });
  try {
    fn(input);
    run.exit_status = 0;
  } catch (const std::exception&) {
    run.exit_status = 1;
    run.failed = true;
  }
  auto end = std::chrono::steady_clock::now();
  done.store(true, std::memory_order_relaxed);
  sampler.join();
  run.wall_seconds = std::chrono::duration<double>(end - start).count();
  run.samples.insert(run.samples.end(), samples.begin(), samples.end());
  run.samples.push_back(
      {std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count(),
       self_rss_mb()});
  for (const BenchSample& s : run.samples)
    run.peak_rss_mb = std::max(run.peak_rss_mb, s.rss_mb);
  return run;
}

}  // namespace detail

/// Runs the target on each input `runs` times, sampling memory every
/// `interval_ms` (>=10). Failed runs are kept in the report but excluded
/// from the means.
inline std::vector<BenchReport> run_benchmark(const BenchTarget& target,
                                              const std::vector<std::string>& inputs,
                                              int runs, int interval_ms) {
  if (runs < 1) throw Error(Errc::usage, "need at least one run");
  if (interval_ms < 10) throw Error(Errc::usage, "sampling interval must be >= 10 ms");
  if (target.command.empty() && !target.fn)
    throw Error(Errc::usage, "benchmark target has nothing to run");
  std::vector<BenchReport> reports;
  for (const std::string& input : inputs) {
    BenchReport report;
    report.target = target.id;
    report.input = input;
    double wall = 0.0;
    double peak = 0.0;
    int ok = 0;
    for (int r = 1; r <= runs; ++r) {
      BenchRun run =
          target.command.empty()
              ? detail::run_in_process_once(target.fn, input, interval_ms)
              : detail::run_command_once(target.command, input, interval_ms);
      run.run = r;
      if (run.failed) {
        ++report.failed_runs;
      } else {
        wall += run.wall_seconds;
        peak += run.peak_rss_mb;
        ++ok;
      }
      report.runs.push_back(std::move(run));
    }
    if (ok > 0) {
      report.mean_wall_seconds = wall / ok;
      report.mean_peak_rss_mb = peak / ok;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

/// One CSV row per run; failed runs keep their measurements but are marked
/// by a nonzero process exit at the command level, not in the table.
inline std::string bench_csv(const std::vector<BenchReport>& reports) {
  char buf[64];
  std::string out = "target,input,run,wall_seconds,peak_rss_mb\n";
  for (const BenchReport& report : reports) {
    for (const BenchRun& run : report.runs) {
      std::snprintf(buf, sizeof buf, "%.6f", run.wall_seconds);
      out += report.target + "," + report.input + "," + std::to_string(run.run) +
             "," + buf + ",";
      std::snprintf(buf, sizeof buf, "%.3f", run.peak_rss_mb);
      out += buf;
      out += "\n";
    }
  }
  return out;
}

/// The memory trace of one run, e.g. for plotting.
inline std::string samples_csv(const BenchRun& run) {
  char buf[64];
  std::string out = "t_ms,rss_mb\n";
  for (const BenchSample& s : run.samples) {
    std::snprintf(buf, sizeof buf, "%.3f", s.rss_mb);
    out += std::to_string(s.t_ms) + "," + buf + "\n";
  }
  return out;
}

}  // namespace cgbench

#endif  // CGBENCH_BENCH_HPP
