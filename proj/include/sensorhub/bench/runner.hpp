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

/// Dataset seeding and the scaling experiment, driven over HTTP.

#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "sensorhub/bench/config.hpp"
#include "sensorhub/bench/cpu.hpp"
#include "sensorhub/bench/report.hpp"
#include "sensorhub/server.hpp"
#include "sensorhub/sos.hpp"

namespace sensorhub::bench {

inline constexpr std::string_view kVersion = "sensorhub-bench 1.0.0";

struct HttpResult {
  int status = -1;
  std::string body;
  double elapsed_ms = 0;
};

/// One connection to the target. Not thread-safe; use one per worker.
class Transport {
 public:
  explicit Transport(const std::string& target) : url_(Url::parse(target)), client_(url_.origin) {
    client_.set_keep_alive(true);
    client_.set_connection_timeout(5);
    client_.set_read_timeout(60);
  }

  HttpResult get(const std::string& path) { return timed([&] { return client_.Get(url_.path + path); }); }

  HttpResult post(const std::string& path, const std::string& body, const std::string& content_type) {
    return timed([&] { return client_.Post(url_.path + path, body, content_type); });
  }

  HttpResult del(const std::string& path) { return timed([&] { return client_.Delete(url_.path + path); }); }

 private:
  template <class F>
  HttpResult timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto res = f();
    HttpResult out;
    out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (res) {
      out.status = res->status;
      out.body = std::move(res->body);
    }
    return out;
  }

  Url url_;
  httplib::Client client_;
};

namespace detail {

inline bool success(int status) { return status >= 200 && status < 300; }

inline json get_json(Transport& t, const std::string& path) {
  auto r = t.get(path);
  if (r.status < 0) throw Error(Errc::TargetUnreachable, "no response for GET " + path, path);
  if (!success(r.status))
    throw Error(Errc::NonSuccessStatus, "GET " + path + " returned " + std::to_string(r.status), path);
  return json::parse(r.body);
}

inline std::uint64_t count_of(Transport& t, const std::string& collection) {
  return get_json(t, "/v1.0/" + collection + "?$top=1&$count=true").at("@iot.count").get<std::uint64_t>();
}

/// Deletes every entity of `collection`, one page at a time.
inline void clear_collection(Transport& t, const std::string& collection) {
  while (true) {
    const auto page = get_json(t, "/v1.0/" + collection + "?$top=1000");
    const auto& value = page.at("value");
    if (value.empty()) return;
    for (const auto& e : value) {
      const auto path = "/v1.0/" + collection + "(" + std::to_string(e.at("@iot.id").get<std::uint64_t>()) + ")";
      auto r = t.del(path);
      // 404 means an earlier cascade already took it
      if (!success(r.status) && r.status != 404)
        throw Error(Errc::NonSuccessStatus, "DELETE " + path + " returned " + std::to_string(r.status), path);
    }
  }
}

inline std::string post_sos(Transport& t, const std::string& xml_body) {
  auto r = t.post("/sos", xml_body, "application/xml");
  if (r.status < 0) throw Error(Errc::TargetUnreachable, "no response for POST /sos", "/sos");
  if (!success(r.status))
    throw Error(Errc::NonSuccessStatus, "POST /sos returned " + std::to_string(r.status) + ": " + r.body, "/sos");
  return r.body;
}

inline std::uint64_t id_from_href(const std::string& href) {
  static const std::regex re(R"(\((\d+)\)$)");
  std::smatch m;
  if (!std::regex_search(href, m, re)) throw Error(Errc::BadResult, "no entity id in '" + href + "'");
  return std::stoull(m[1].str());
}

inline std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace detail

/// Fails with TargetUnreachable unless the landing page answers.
inline void probe(const std::string& target) {
  Transport t(target);
  auto r = t.get("/");
  if (r.status < 0) throw Error(Errc::TargetUnreachable, "cannot reach " + target, target);
  if (!detail::success(r.status))
    throw Error(Errc::TargetUnreachable, target + " answered " + std::to_string(r.status), target);
}

inline std::string procedure_id(std::size_t thing, std::size_t datastream) {
  return "bench-t" + std::to_string(thing) + "-d" + std::to_string(datastream);
}

inline Instant seed_epoch() { return *parse_instant("2020-05-01T00:00:00Z"); }

struct SeedSummary {
  std::size_t things = 0;
  std::size_t datastreams = 0;
  std::size_t observations = 0;
};

/// Populates the target through its SOS endpoint. Observation i of each
/// datastream is stamped epoch + i minutes; values come from mt19937_64.
/// An already populated target is refused unless `force`, which first
/// deletes every Thing, Sensor, ObservedProperty, FeatureOfInterest and
/// Location.
inline SeedSummary seed_dataset(const ExperimentConfig& config, bool force = false,
                                const std::function<void(std::string_view)>& progress = {}) {
  probe(config.target);
  Transport t(config.target);
  if (detail::count_of(t, "Things") > 0 || detail::count_of(t, "Observations") > 0) {
    if (!force) throw Error(Errc::SeedConflict, config.target + " already holds data", config.target);
    for (const char* c : {"Things", "Sensors", "ObservedProperties", "FeaturesOfInterest", "Locations"})
      detail::clear_collection(t, c);
  }
  std::mt19937_64 rng(config.rng_seed);
  std::normal_distribution<double> temperature(36.8, 0.6);
  SeedSummary out;
  for (std::size_t th = 0; th < config.seed.things; ++th) {
    std::optional<EntityRef> thing;
    for (std::size_t d = 0; d < config.seed.datastreams_per_thing; ++d) {
      sos::Procedure p;
      p.procedure_id = procedure_id(th, d);
      p.name = "Bench station " + std::to_string(th) + " sensor " + std::to_string(d);
      p.observed_properties.push_back(
          {"bodyTemperature", "urn:sensorhub:def:bodyTemperature", sos::ResultType::Numeric, "degC", "degree Celsius"});
      p.foi_name = "bench site " + std::to_string(th);
      p.foi = {10.0 + 0.01 * static_cast<double>(th), 50.0 + 0.01 * static_cast<double>(th)};
      p.reuse_thing = thing;
      const auto response = xml::parse(detail::post_sos(t, sos::register_sensor_xml(p)));
      if (!thing) {
        const auto* href = response.child("thing");
        if (!href || !href->attribute("href")) throw Error(Errc::BadResult, "RegisterSensor response lacks a thing");
        thing = EntityRef{EntityKind::Thing, detail::id_from_href(*href->attribute("href"))};
        ++out.things;
      }
      ++out.datastreams;
      for (std::size_t i = 0; i < config.seed.observations_per_datastream; ++i) {
        const Instant at = seed_epoch() + std::chrono::minutes(i);
        detail::post_sos(t, sos::insert_observation_xml(p.procedure_id, at, detail::one_decimal(temperature(rng))));
        ++out.observations;
      }
      if (progress) progress("seeded " + p.procedure_id);
    }
  }
  return out;
}

/// The datastream under test and the phenomenon times of its observations.
struct Target {
  std::uint64_t datastream = 0;
  std::string procedure;
  std::vector<Instant> times;
};

inline Target discover(const std::string& target) {
  Transport t(target);
  const auto ds = detail::get_json(t, "/v1.0/Datastreams?$top=1");
  if (ds.at("value").empty()) throw Error(Errc::NotFound, target + " has no Datastreams; seed it first", target);
  Target out;
  const auto& first = ds.at("value").at(0);
  out.datastream = first.at("@iot.id").get<std::uint64_t>();
  const auto name = first.at("name").get<std::string>();
  out.procedure = name.substr(0, name.find(':'));
  const auto base = "/v1.0/Datastreams(" + std::to_string(out.datastream) + ")/Observations?$top=100&$skip=";
  while (true) {
    const auto page = detail::get_json(t, base + std::to_string(out.times.size()));
    const auto& value = page.at("value");
    if (value.empty()) break;
    for (const auto& o : value) {
      const auto tv = parse_time_value(o.at("phenomenonTime").get<std::string>());
      if (!tv) throw Error(Errc::BadTimestamp, "unparseable phenomenonTime");
      out.times.push_back(end_of(*tv));
    }
    if (!page.contains("@iot.nextLink")) break;
  }
  return out;
}

struct PlannedRequest {
  bool post = false;
  std::string path;
  std::string body;
};

/// The request(s) that retrieve `step` items once.
inline std::vector<PlannedRequest> plan_step(const Target& tgt, Protocol protocol, Mode mode, std::size_t step) {
  const auto obs = "/v1.0/Datastreams(" + std::to_string(tgt.datastream) + ")/Observations?";
  const std::string format = protocol == Protocol::StaDataArray ? "&resultFormat=dataArray" : "";
  std::vector<PlannedRequest> out;
  if (mode == Mode::OneRequestNItems) {
    if (protocol == Protocol::Sos)
      out.push_back({true, "/sos", sos::get_observation_xml(tgt.procedure, Interval{tgt.times[0], tgt.times[step - 1]})});
    else
      out.push_back({false, obs + "$top=" + std::to_string(step) + format, {}});
  } else {
    for (std::size_t i = 0; i < step; ++i) {
      if (protocol == Protocol::Sos)
        out.push_back({true, "/sos", sos::get_observation_xml(tgt.procedure, Interval{tgt.times[i], tgt.times[i]})});
      else
        out.push_back({false, obs + "$top=1&$skip=" + std::to_string(i) + format, {}});
    }
  }
  return out;
}

namespace detail {

inline HttpResult send(Transport& t, const PlannedRequest& r) {
  return r.post ? t.post(r.path, r.body, "application/xml") : t.get(r.path);
}

}  // namespace detail

/// Runs every (protocol, step) cell. Each cell repeats its retrieval
/// `repetitions` times, spread over `concurrency` connections; `warmup`
/// untimed requests precede each protocol. A non-success status ends the
/// cell and is recorded in StepResult::error. Every issued request, failed
/// or not, contributes a latency, a body size and a status count.
inline BenchmarkReport run_scaling_experiment(const ExperimentConfig& config,
                                              const std::function<void(std::string_view)>& progress = {}) {
  validate(config);
  probe(config.target);
  const auto tgt = discover(config.target);
  if (tgt.times.size() < config.steps.back())
    throw Error(Errc::BadConfig,
                "largest step " + std::to_string(config.steps.back()) + " exceeds the " +
                    std::to_string(tgt.times.size()) + " observations available",
                "steps");

  const bool sample = config.server_pid.has_value() && cpu_accounting_available();
  if (config.server_pid && !cpu_accounting_available() && progress)
    progress("warning: no /proc accounting here, CPU sampling disabled");

  BenchmarkReport report;
  report.config = config;
  std::vector<std::unique_ptr<Transport>> workers;
  for (std::size_t w = 0; w < config.concurrency; ++w) workers.push_back(std::make_unique<Transport>(config.target));

  for (auto protocol : config.protocols) {
    const auto warm = plan_step(tgt, protocol, Mode::OneRequestNItems, config.steps.front());
    for (std::size_t i = 0; i < config.warmup; ++i) detail::send(*workers[i % workers.size()], warm.front());

    for (auto step : config.steps) {
      StepResult res;
      res.protocol = protocol;
      res.mode = config.mode;
      res.step = step;
      res.passes = config.repetitions;

      const auto plan = plan_step(tgt, protocol, config.mode, step);
      const std::size_t total = plan.size() * config.repetitions;
      std::vector<std::optional<HttpResult>> results(total);
      std::atomic<std::size_t> next{0};
      std::atomic<bool> failed{false};

      std::unique_ptr<CpuSampler> sampler;
      if (sample) sampler = std::make_unique<CpuSampler>(static_cast<pid_t>(*config.server_pid));

      std::vector<std::thread> threads;
      for (auto& w : workers) {
        threads.emplace_back([&, t = w.get()] {
          while (!failed.load()) {
            const auto i = next.fetch_add(1);
            if (i >= total) return;
            results[i] = detail::send(*t, plan[i % plan.size()]);
            if (!detail::success(results[i]->status)) failed = true;
          }
        });
      }
      for (auto& th : threads) th.join();
      if (sampler) res.cpu = sampler->stop();

      for (const auto& r : results) {
        if (!r) continue;  // not issued after an abort
        ++res.statuses[r->status];
        res.latencies_ms.push_back(r->elapsed_ms);
        res.body_bytes.push_back(r->body.size());
        if (!detail::success(r->status) && !res.error)
          res.error = r->status < 0 ? "no response from " + config.target
                                    : "status " + std::to_string(r->status) + ": " + r->body.substr(0, 200);
      }
      if (progress)
        progress(std::string(to_string(protocol)) + " step " + std::to_string(step) + ": " +
                 std::to_string(res.requests()) + " requests" + (res.error ? " (aborted: " + *res.error + ")" : ""));
      report.steps.push_back(std::move(res));
    }
  }
  report.environment = capture_environment(std::string(kVersion));
  return report;
}

}  // namespace sensorhub::bench
