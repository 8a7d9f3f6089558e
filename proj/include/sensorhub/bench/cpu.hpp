// Copyright 2026 The SensorHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// Process CPU utilization from /proc/<pid>/stat (utime + stime), as a
/// percentage of one core.

#pragma once

#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sensorhub/error.hpp"
#include "sensorhub/time.hpp"

namespace sensorhub::bench {

struct CpuSample {
  Instant at;
  double percent = 0;
};

/// True when this platform exposes per-process accounting under /proc.
inline bool cpu_accounting_available() { return std::filesystem::exists("/proc/self/stat"); }

/// Cumulative user+system CPU time of `pid`, in seconds.
inline double process_cpu_seconds(pid_t pid) {
  const auto path = "/proc/" + std::to_string(pid) + "/stat";
  std::ifstream in(path);
  if (!in) {
    const int err = errno;
    if (err == EACCES || err == EPERM) throw Error(Errc::PermissionDenied, "cannot read " + path, path);
    throw Error(Errc::NoSuchProcess, "no process with pid " + std::to_string(pid), std::to_string(pid));
  }
  std::string line;
  std::getline(in, line);
  // The command name is parenthesised and may itself contain spaces.
  const auto close = line.rfind(')');
  if (close == std::string::npos) throw Error(Errc::NoSuchProcess, "unreadable " + path, path);
  std::istringstream fields(line.substr(close + 2));
  std::string skip;
  // fields after ')': state(3) ... utime(14) stime(15)
  for (int i = 3; i < 14; ++i) fields >> skip;
  unsigned long long utime = 0, stime = 0;
  fields >> utime >> stime;
  if (!fields) throw Error(Errc::NoSuchProcess, "unreadable " + path, path);
  static const long ticks = sysconf(_SC_CLK_TCK);
  return static_cast<double>(utime + stime) / static_cast<double>(ticks);
}

/// Blocks for `duration`, taking one sample every `interval`.
inline std::vector<CpuSample> sample_cpu(pid_t pid, std::chrono::milliseconds interval,
                                         std::chrono::milliseconds duration) {
  using clock = std::chrono::steady_clock;
  std::vector<CpuSample> out;
  double prev_cpu = process_cpu_seconds(pid);
  auto prev = clock::now();
  const auto end = prev + duration;
  auto next = prev + interval;
  while (next <= end) {
    std::this_thread::sleep_until(next);
    double cpu = 0;
    try {
      cpu = process_cpu_seconds(pid);
    } catch (const Error&) {
      break;  // process exited
    }
    const auto now = clock::now();
    const double wall = std::chrono::duration<double>(now - prev).count();
    out.push_back({now_utc(), wall > 0 ? (cpu - prev_cpu) / wall * 100.0 : 0.0});
    prev_cpu = cpu;
    prev = now;
    next += interval;
  }
  return out;
}

/// Periodic sampler on its own thread, for "as long as this step runs".
class CpuSampler {
 public:
  CpuSampler(pid_t pid, std::chrono::milliseconds interval = std::chrono::milliseconds{250})
      : pid_(pid), interval_(interval) {
    last_cpu_ = process_cpu_seconds(pid_);
    last_ = std::chrono::steady_clock::now();
    thread_ = std::thread([this] { run(); });
  }

  ~CpuSampler() { stop(); }

  CpuSampler(const CpuSampler&) = delete;
  CpuSampler& operator=(const CpuSampler&) = delete;

  std::vector<CpuSample> stop() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) {
      thread_.join();
      take_final_sample();
    }
    std::lock_guard lock(mu_);
    return samples_;
  }

 private:
  void run() {
    auto next = last_ + interval_;
    std::unique_lock lock(mu_);
    while (!cv_.wait_until(lock, next, [this] { return stopping_; })) {
      double cpu = 0;
      try {
        cpu = process_cpu_seconds(pid_);
      } catch (const Error&) {
        return;
      }
      const auto now = std::chrono::steady_clock::now();
      const double wall = std::chrono::duration<double>(now - last_).count();
      samples_.push_back({now_utc(), wall > 0 ? (cpu - last_cpu_) / wall * 100.0 : 0.0});
      last_cpu_ = cpu;
      last_ = now;
      next += interval_;
    }
  }

  /// Covers the tail since the last periodic sample, so a run shorter
  /// than one interval still yields a reading.
  void take_final_sample() {
    const auto now = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double>(now - last_).count();
    if (wall < std::chrono::duration<double>(interval_).count() / 10) return;
    try {
      const double cpu = process_cpu_seconds(pid_);
      std::lock_guard lock(mu_);
      samples_.push_back({now_utc(), (cpu - last_cpu_) / wall * 100.0});
    } catch (const Error&) {
    }
  }

  pid_t pid_;
  std::chrono::milliseconds interval_;
  double last_cpu_ = 0;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::vector<CpuSample> samples_;
  std::thread thread_;
};

}  // namespace sensorhub::bench
