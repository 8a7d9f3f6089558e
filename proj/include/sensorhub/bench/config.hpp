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

/// Experiment configuration and its key-value text format:
///
///   # comment
///   target       = http://127.0.0.1:8080
///   protocols    = sta-default, sta-dataArray, sos
///   steps        = 1, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000
///   mode         = one-request-n-items      # or n-requests-one-item
///   concurrency  = 1
///   warmup       = 10
///   repetitions  = 5
///   server_pid   = 4242                     # optional, enables CPU sampling
///   seed         = 1, 1, 1000               # things, datastreams/thing, observations/datastream
///   rng_seed     = 20200501
///   output       = bench-out

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sensorhub/error.hpp"

namespace sensorhub::bench {

using json = nlohmann::json;

enum class Protocol { StaDefault, StaDataArray, Sos };
enum class Mode { OneRequestNItems, NRequestsOneItem };

inline constexpr std::size_t kMaxStep = 1000;

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::StaDefault: return "sta-default";
    case Protocol::StaDataArray: return "sta-dataArray";
    case Protocol::Sos: return "sos";
  }
  return "sta-default";
}

inline std::string_view to_string(Mode m) {
  return m == Mode::OneRequestNItems ? "one-request-n-items" : "n-requests-one-item";
}

inline Protocol protocol_from(std::string_view s) {
  if (s == "sta-default") return Protocol::StaDefault;
  if (s == "sta-dataArray") return Protocol::StaDataArray;
  if (s == "sos") return Protocol::Sos;
  throw Error(Errc::BadConfig, "unknown protocol '" + std::string(s) + "'", "protocols");
}

inline Mode mode_from(std::string_view s) {
  if (s == "one-request-n-items") return Mode::OneRequestNItems;
  if (s == "n-requests-one-item") return Mode::NRequestsOneItem;
  throw Error(Errc::BadConfig, "unknown mode '" + std::string(s) + "'", "mode");
}

struct SeedSpec {
  std::size_t things = 1;
  std::size_t datastreams_per_thing = 1;
  std::size_t observations_per_datastream = 1000;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

inline std::vector<std::size_t> default_steps() {
  std::vector<std::size_t> s{1};
  for (std::size_t n = 100; n <= kMaxStep; n += 100) s.push_back(n);
  return s;
}

struct ExperimentConfig {
  std::string target = "http://127.0.0.1:8080";
  std::vector<Protocol> protocols{Protocol::StaDefault};
  std::vector<std::size_t> steps = default_steps();
  Mode mode = Mode::OneRequestNItems;
  std::size_t concurrency = 1;
  std::size_t warmup = 10;
  std::size_t repetitions = 5;
  std::optional<int> server_pid;
  SeedSpec seed;
  std::uint64_t rng_seed = 20200501;
  std::string output = "bench-out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline void validate(const ExperimentConfig& c) {
  if (c.steps.empty()) throw Error(Errc::BadConfig, "steps is empty", "steps");
  for (std::size_t i = 0; i < c.steps.size(); ++i) {
    if (c.steps[i] == 0) throw Error(Errc::BadConfig, "steps must be positive", "steps");
    if (i > 0 && c.steps[i] <= c.steps[i - 1])
      throw Error(Errc::BadConfig, "steps must be strictly increasing", "steps");
  }
  if (c.steps.back() > kMaxStep)
    throw Error(Errc::BadConfig, "steps may not exceed " + std::to_string(kMaxStep), "steps");
  if (c.protocols.empty()) throw Error(Errc::BadConfig, "no protocols selected", "protocols");
  if (c.concurrency == 0) throw Error(Errc::BadConfig, "concurrency must be at least 1", "concurrency");
  if (c.repetitions == 0) throw Error(Errc::BadConfig, "repetitions must be at least 1", "repetitions");
  if (c.seed.things == 0 || c.seed.datastreams_per_thing == 0)
    throw Error(Errc::BadConfig, "seed needs at least one Thing and one Datastream", "seed");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_unsigned(const std::string& key, std::string_view v) {
  T n{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw Error(Errc::BadConfig, key + ": '" + std::string(v) + "' is not a non-negative integer", key);
  return n;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::BadConfig, "line " + std::to_string(lineno) + ": expected key = value");
    const auto key = detail::trim(std::string_view(t).substr(0, eq));
    const auto value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key == "target") {
      c.target = value;
      while (!c.target.empty() && c.target.back() == '/') c.target.pop_back();
    } else if (key == "protocols" || key == "protocol") {
      c.protocols.clear();
      for (const auto& p : detail::split_list(value)) c.protocols.push_back(protocol_from(p));
    } else if (key == "steps") {
      c.steps.clear();
      for (const auto& s : detail::split_list(value)) c.steps.push_back(detail::parse_unsigned<std::size_t>(key, s));
    } else if (key == "mode") {
      c.mode = mode_from(value);
    } else if (key == "concurrency") {
      c.concurrency = detail::parse_unsigned<std::size_t>(key, value);
    } else if (key == "warmup") {
      c.warmup = detail::parse_unsigned<std::size_t>(key, value);
    } else if (key == "repetitions") {
      c.repetitions = detail::parse_unsigned<std::size_t>(key, value);
    } else if (key == "server_pid") {
      c.server_pid = detail::parse_unsigned<int>(key, value);
    } else if (key == "seed") {
      const auto parts = detail::split_list(value);
      if (parts.size() != 3) throw Error(Errc::BadConfig, "seed needs things, datastreams, observations", key);
      c.seed = {detail::parse_unsigned<std::size_t>(key, parts[0]), detail::parse_unsigned<std::size_t>(key, parts[1]),
                detail::parse_unsigned<std::size_t>(key, parts[2])};
    } else if (key == "rng_seed") {
      c.rng_seed = detail::parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "output") {
      c.output = value;
    } else {
      throw Error(Errc::BadConfig, "line " + std::to_string(lineno) + ": unknown key '" + key + "'", key);
    }
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read config " + path, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline json to_json(const ExperimentConfig& c) {
  json protocols = json::array();
  for (auto p : c.protocols) protocols.push_back(to_string(p));
  json j = {{"target", c.target},
            {"protocols", protocols},
            {"steps", c.steps},
            {"mode", to_string(c.mode)},
            {"concurrency", c.concurrency},
            {"warmup", c.warmup},
            {"repetitions", c.repetitions},
            {"seed",
             {c.seed.things, c.seed.datastreams_per_thing, c.seed.observations_per_datastream}},
            {"rngSeed", c.rng_seed},
            {"output", c.output}};
  j["serverPid"] = c.server_pid ? json(*c.server_pid) : json(nullptr);
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.target = j.at("target").get<std::string>();
  c.protocols.clear();
  for (const auto& p : j.at("protocols")) c.protocols.push_back(protocol_from(p.get<std::string>()));
  c.steps = j.at("steps").get<std::vector<std::size_t>>();
  c.mode = mode_from(j.at("mode").get<std::string>());
  c.concurrency = j.at("concurrency").get<std::size_t>();
  c.warmup = j.at("warmup").get<std::size_t>();
  c.repetitions = j.at("repetitions").get<std::size_t>();
  const auto& s = j.at("seed");
  c.seed = {s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<std::size_t>()};
  c.rng_seed = j.at("rngSeed").get<std::uint64_t>();
  c.output = j.at("output").get<std::string>();
  if (!j.at("serverPid").is_null()) c.server_pid = j.at("serverPid").get<int>();
  return c;
}

}  // namespace sensorhub::bench
