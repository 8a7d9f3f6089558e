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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <signal.h>
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "http_support.hpp"
#include "sensorhub/bench/runner.hpp"
#include "sensorhub/server.hpp"
#include "test_support.hpp"

using namespace sensorhub;
namespace st = sensorhub::testing;
using namespace std::chrono_literals;

namespace {

constexpr std::string_view kBase = "http://sensorhub.test";

struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failed(what);
}

ServiceConfig config() {
  ServiceConfig c;
  c.base_url = std::string(kBase);
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json body(const Response& r) { return json::parse(r.body); }

std::string path_of(EntityRef r) { return "/v1.0/" + std::string(collection_name(r.kind)) + "(" + std::to_string(r.id) + ")"; }

// ---------------------------------------------------------------- 1

std::string dataarray_reduction() {
  const auto start = std::chrono::steady_clock::now();
  Store store;
  Service svc(store, config());
  const auto g = st::seed_graph(store, 1, 1, 1000);
  const auto base = path_of(g.datastreams[0]) + "/Observations?$top=1000";
  const auto def = st::get(svc, base);
  const auto arr = st::get(svc, base + "&resultFormat=dataArray");
  require(def.status == 200 && arr.status == 200, "GET failed");
  require(body(def)["value"].size() == 1000, "default page does not hold 1000 observations");
  require(body(arr)["value"][0]["dataArray"].size() == 1000, "dataArray does not hold 1000 rows");
  const double ratio = static_cast<double>(arr.body.size()) / static_cast<double>(def.body.size());
  const double secs = seconds_since(start);
  const std::string detail = "dataArray/default = " + std::to_string(arr.body.size()) + "/" +
                             std::to_string(def.body.size()) + " = " + fmt(ratio, 4) + " (limit 0.55), " +
                             fmt(secs, 2) + " s (limit 10 s)";
  require(ratio <= 0.55, detail);
  require(secs < 10, detail);
  return detail;
}

// ---------------------------------------------------------------- 2

Response post_sos(Service& svc, const std::string& xml_body) { return st::call(svc, "POST", "/sos", xml_body); }

std::string protocol_size_ordering() {
  Store store;
  Service svc(store, config());
  sos::Procedure p;
  p.procedure_id = "ward-1";
  p.name = "Ward 1 thermometer";
  p.observed_properties.push_back(
      {"bodyTemperature", "urn:sensorhub:def:bodyTemperature", sos::ResultType::Numeric, "degC", "degree Celsius"});
  p.foi_name = "Ward 1";
  p.foi = {-86.6, 34.7};
  require(post_sos(svc, sos::register_sensor_xml(p)).status == 201, "RegisterSensor failed");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> temp(36.8, 0.6);
  std::vector<Instant> times;
  for (int i = 0; i < 1000; ++i) {
    times.push_back(st::t0() + std::chrono::minutes(i));
    char v[16];
    std::snprintf(v, sizeof v, "%.1f", temp(rng));
    require(post_sos(svc, sos::insert_observation_xml("ward-1", times.back(), v)).status == 201,
            "InsertObservation failed");
  }
  const auto ds = store.read([](const StoreView& v) { return v.table(EntityKind::Datastream).begin()->first; });
  std::string detail;
  for (std::size_t n : {100, 500, 1000}) {
    const auto x = post_sos(svc, sos::get_observation_xml("ward-1", Interval{times[0], times[n - 1]}));
    const auto nav = "/v1.0/Datastreams(" + std::to_string(ds) + ")/Observations?$top=" + std::to_string(n);
    const auto d = st::get(svc, nav);
    const auto a = st::get(svc, nav + "&resultFormat=dataArray");
    require(x.status == 200 && d.status == 200 && a.status == 200, "fetch failed at " + std::to_string(n));
    require(*xml::parse(x.body).attribute("count") == std::to_string(n), "XML count mismatch at " + std::to_string(n));
    require(body(d)["value"].size() == n, "default count mismatch at " + std::to_string(n));
    detail += (detail.empty() ? "" : "; ") + std::to_string(n) + ": xml " + std::to_string(x.body.size()) +
              " > default " + std::to_string(d.body.size()) + " > dataArray " + std::to_string(a.body.size());
    require(x.body.size() > d.body.size() && d.body.size() > a.body.size(), detail);
  }
  return detail;
}

// ---------------------------------------------------------------- 3

std::string experiment_ceiling() {
  Store store;
  Service svc(store, config());
  const auto g = st::seed_graph(store, 1, 1, 1000);
  std::string detail;
  for (const std::string& path : {std::string("/v1.0/Observations"), path_of(g.datastreams[0]) + "/Observations"}) {
    const auto over = st::get(svc, path + "?$top=1001");
    const auto at = st::get(svc, path + "?$top=1000");
    detail += (detail.empty() ? "" : "; ") + path + " $top=1001 -> " + std::to_string(over.status) +
              ", $top=1000 -> " + std::to_string(at.status);
    require(over.status == 400 && at.status == 200, detail);
    require(body(at)["value"].size() == 1000, "$top=1000 did not return 1000 items");
  }
  return detail;
}

// ---------------------------------------------------------------- 4

/// Crawls over real HTTP. Links carry the configured base URL, which the
/// fetcher maps onto the loopback port.
std::string link_closure() {
  const auto start = std::chrono::steady_clock::now();
  Store store;
  st::seed_graph(store, 3, 2, 10);
  require(store.read([](const StoreView& v) {
            return v.size(EntityKind::Thing) == 3 && v.size(EntityKind::Datastream) == 6 &&
                   v.size(EntityKind::Observation) == 60;
          }),
          "seed shape is not 3/6/60");

  ServiceConfig c;
  c.base_url = std::string(kBase);
  Service svc(store, c);
  HttpServer server(svc, 16);
  const int port = server.bind("127.0.0.1", 0);
  server.start();

  httplib::Client client("127.0.0.1", port);
  client.set_keep_alive(true);
  const auto fetch = [&](const std::string& url) {
    if (!url.starts_with(c.base_url)) return Response{599, "", "foreign link", {}};
    auto res = client.Get(url.substr(c.base_url.size()));
    if (!res) return Response{598, "", "no response", {}};
    return Response{res->status, "", res->body, {}};
  };
  const auto crawl = st::crawl(c.base_url, fetch);
  server.stop();

  std::size_t missing = 0;
  for (const auto& e : store.all())
    if (!crawl.entities.contains(self_link(c.base_url, ref_of(e)))) ++missing;
  const double secs = seconds_since(start);
  const std::string detail = std::to_string(crawl.fetches) + " fetches, " + std::to_string(crawl.failures.size()) +
                             " non-200, " + std::to_string(crawl.entities.size()) + "/" +
                             std::to_string(store.read([](const StoreView& v) { return v.total(); })) +
                             " entities reached, " + std::to_string(missing) + " missing, " + fmt(secs, 2) +
                             " s (limit 30 s)";
  require(crawl.failures.empty() && missing == 0 && secs < 30, detail);
  return detail;
}

// ---------------------------------------------------------------- 5

/// Served document without links, as a plain field object.
json served_fields(const json& doc) {
  json out = json::object();
  for (const auto& [k, v] : doc.items())
    if (k.find("@iot") == std::string::npos) out[k] = v;
  return out;
}

json expected_fields(const Entity& e) {
  json out = json::object();
  const json fields = to_field_map(e);
  for (const auto& [k, v] : fields.items())
    if (!is_relation_field(k)) out[k] = v;
  return out;
}

struct CrudRun {
  Store store;
  Service svc{store, config()};
  std::map<EntityRef, Entity> model;
  std::mt19937_64 rng{500};
  std::map<std::string, int> ops;
  std::size_t checks = 0;

  std::vector<EntityRef> of_kind(EntityKind k) const {
    std::vector<EntityRef> out;
    for (const auto& [r, e] : model)
      if (r.kind == k) out.push_back(r);
    return out;
  }

  template <class T>
  T pick(const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  }

  void verify(EntityRef ref) {
    const auto& e = model.at(ref);
    const auto r = st::get(svc, path_of(ref));
    require(r.status == 200, "GET " + path_of(ref) + " returned " + std::to_string(r.status));
    require(served_fields(body(r)) == expected_fields(e), "read-your-write mismatch on " + path_of(ref));
    ++checks;
    const json fields = to_field_map(e);
    for (const auto& [k, v] : fields.items()) {
      if (!is_relation_field(k)) continue;
      const auto nav = st::get(svc, path_of(ref) + "/" + k + (v.is_array() ? "?$top=1000" : ""));
      require(nav.status == 200, "navigation " + path_of(ref) + "/" + k + " failed");
      const auto got = body(nav);
      if (v.is_array()) {
        std::set<std::uint64_t> want, have;
        for (const auto& x : v) want.insert(x["@iot.id"].get<std::uint64_t>());
        for (const auto& x : got["value"]) have.insert(x["@iot.id"].get<std::uint64_t>());
        require(want == have, "to-many relation " + k + " mismatch on " + path_of(ref));
      } else {
        require(got["@iot.id"] == v["@iot.id"], "to-one relation " + k + " mismatch on " + path_of(ref));
      }
      ++checks;
    }
  }

  std::optional<Entity> random_new() {
    const auto things = of_kind(EntityKind::Thing);
    const auto locations = of_kind(EntityKind::Location);
    const auto sensors = of_kind(EntityKind::Sensor);
    const auto props = of_kind(EntityKind::ObservedProperty);
    const auto foi = of_kind(EntityKind::FeatureOfInterest);
    const auto ds = of_kind(EntityKind::Datastream);
    switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
      case 0: {
        auto t = st::random_thing(rng);
        for (int i = 0, n = static_cast<int>(rng() % 3); i < n && !locations.empty(); ++i) {
          const auto l = pick(locations);
          if (std::find(t.locations.begin(), t.locations.end(), l) == t.locations.end()) t.locations.push_back(l);
        }
        return t;
      }
      case 1: return st::random_location(rng);
      case 2: return st::random_sensor(rng);
      case 3: return st::random_property(rng);
      case 4: return st::random_feature(rng);
      case 5:
        if (things.empty() || sensors.empty() || props.empty()) return std::nullopt;
        return st::make_datastream(pick(things), pick(sensors), pick(props), st::random_text(rng));
      default:
        if (ds.empty() || foi.empty()) return std::nullopt;
        return st::make_observation(pick(ds), st::random_instant(rng), st::random_scalar(rng), pick(foi));
    }
  }

  void create() {
    auto e = random_new();
    if (!e) e = st::random_location(rng);
    const auto kind = kind_of(*e);
    const auto r = st::call(svc, "POST", "/v1.0/" + std::string(collection_name(kind)), to_field_map(*e).dump());
    require(r.status == 201, "POST " + std::string(collection_name(kind)) + " returned " + std::to_string(r.status) +
                                 ": " + r.body);
    set_id(*e, body(r)["@iot.id"].get<std::uint64_t>());
    const auto ref = ref_of(*e);
    model[ref] = *e;
    verify(ref);
    ++ops["create"];
  }

  void read() {
    verify(pick_any());
    ++ops["read"];
  }

  EntityRef pick_any() {
    auto it = model.begin();
    std::advance(it, static_cast<long>(std::uniform_int_distribution<std::size_t>(0, model.size() - 1)(rng)));
    return it->first;
  }

  void patch() {
    const auto ref = pick_any();
    auto& e = model.at(ref);
    json p;
    std::visit(
        [&](auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Observation>) {
            x.result = st::random_scalar(rng);
            p["result"] = scalar_to_json(x.result);
          } else if constexpr (!std::is_same_v<T, HistoricalLocation>) {
            x.name = st::random_text(rng);
            p["name"] = x.name;
            if (rng() % 2) {
              x.description = st::random_text(rng, 0);
              p["description"] = x.description;
            }
          }
        },
        e);
    const auto r = st::call(svc, "PATCH", path_of(ref), p.dump());
    require(r.status == 200, "PATCH " + path_of(ref) + " returned " + std::to_string(r.status) + ": " + r.body);
    require(served_fields(body(r)) == expected_fields(e), "PATCH response differs from merged model");
    verify(ref);
    ++ops["patch"];
  }

  void remove() {
    const auto ref = pick_any();
    const auto snapshot = store.all();
    bool in_use = false;
    for (const auto& e : snapshot)
      for (const auto& h : held_refs(e))
        if (h.target == ref && ((ref.kind != EntityKind::FeatureOfInterest && kind_of(e) == EntityKind::Datastream &&
                                 (ref.kind == EntityKind::Sensor || ref.kind == EntityKind::ObservedProperty)) ||
                                (ref.kind == EntityKind::FeatureOfInterest && kind_of(e) == EntityKind::Observation)))
          in_use = true;
    const auto r = st::call(svc, "DELETE", path_of(ref));
    if (in_use) {
      require(r.status == 409, "DELETE of referenced " + path_of(ref) + " returned " + std::to_string(r.status));
      verify(ref);
      ++ops["delete-refused"];
      return;
    }
    require(r.status == 200, "DELETE " + path_of(ref) + " returned " + std::to_string(r.status) + ": " + r.body);
    const auto oracle = st::reachable_for_delete(snapshot, ref);
    std::set<std::string> want, got;
    for (const auto& d : oracle) want.insert(self_link(kBase, d));
    const auto report = body(r);
    for (const auto& d : report["deleted"]) got.insert(d.get<std::string>());
    require(want == got, "cascade of " + path_of(ref) + " differs from the reachability oracle");
    for (const auto& d : oracle) {
      require(st::get(svc, path_of(d)).status == 404, path_of(d) + " survived its cascade");
      model.erase(d);
    }
    if (ref.kind == EntityKind::Location)
      for (auto& [mr, me] : model)
        if (auto* t = std::get_if<Thing>(&me)) std::erase(t->locations, ref);
    ++ops["delete"];
  }
};

std::string crud_conformance() {
  CrudRun run;
  for (int i = 0; i < 500; ++i) {
    const int roll = std::uniform_int_distribution<int>(0, 99)(run.rng);
    if (run.model.size() < 5 || roll < 40) run.create();
    else if (roll < 65) run.read();
    else if (roll < 85) run.patch();
    else run.remove();
  }
  const auto dangling = st::dangling_refs(run.store.all());
  std::string detail = "500 ops (";
  for (const auto& [k, n] : run.ops) detail += k + " " + std::to_string(n) + ", ";
  detail += std::to_string(run.checks) + " reads verified), " + std::to_string(dangling.size()) +
            " integrity violations over " + std::to_string(run.store.all().size()) + " entities";
  require(dangling.empty(), detail);
  return detail;
}

// ---------------------------------------------------------------- 6

std::string sos_ordering_rule() {
  Store store;
  Service svc(store, config());
  const auto ins = sos::insert_observation_xml("bedside-3", st::t0(), "37.2");
  const auto early = post_sos(svc, ins);
  const auto early_doc = xml::parse(early.body);
  const auto* exc = early_doc.child("Exception");
  require(early.status == 400 && exc && exc->attribute("exceptionCode") &&
              *exc->attribute("exceptionCode") == "UnknownProcedure",
          "insert before register returned " + std::to_string(early.status) + ": " + early.body);
  require(store.read([](const StoreView& v) { return v.total(); }) == 0, "rejected insert left entities behind");

  sos::Procedure p;
  p.procedure_id = "bedside-3";
  p.name = "Bedside monitor 3";
  p.observed_properties.push_back(
      {"bodyTemperature", "urn:sensorhub:def:bodyTemperature", sos::ResultType::Numeric, "degC", "degree Celsius"});
  p.foi_name = "Room 3";
  p.foi = {-86.6, 34.7};
  require(post_sos(svc, sos::register_sensor_xml(p)).status == 201, "RegisterSensor failed");
  const auto late = post_sos(svc, ins);
  require(late.status == 201, "insert after register returned " + std::to_string(late.status));
  const auto href = *xml::parse(late.body).child("observation")->attribute("href");
  require(href.starts_with(kBase), "observation href is not absolute");
  const auto obs = st::get(svc, href.substr(kBase.size()));
  require(obs.status == 200 && body(obs)["result"] == 37.2, "observation not visible at " + href);
  const auto ds = st::get(svc, href.substr(kBase.size()) + "/Datastream");
  const auto nav = st::get(svc, "/v1.0/Datastreams(" + std::to_string(body(ds)["@iot.id"].get<std::uint64_t>()) +
                                    ")/Observations");
  require(nav.status == 200 && body(nav)["value"].size() == 1, "observation not listed under its Datastream");
  return "insert before register -> 400 UnknownProcedure; after register -> 201; visible at " +
         href.substr(kBase.size()) + " and via Datastream navigation";
}

// ---------------------------------------------------------------- 7

std::string cop_roundtrip_and_dedup() {
  std::mt19937_64 rng(1000);
  std::vector<cop::CopMessage> batch;
  std::size_t equal = 0;
  for (int i = 0; i < 1000; ++i) {
    batch.push_back(st::random_cop(rng, i));
    if (cop::decode(cop::encode(batch.back())) == batch.back()) ++equal;
  }
  Store store;
  Service svc(store, config());
  std::size_t created_first = 0, created_again = 0;
  for (const auto& m : batch) {
    const auto r = st::call(svc, "POST", "/cop", cop::encode(m));
    require(r.status == 201, "first ingest returned " + std::to_string(r.status) + ": " + r.body);
    created_first += body(r)["created"].size();
  }
  const auto total = store.read([](const StoreView& v) { return v.total(); });
  for (const auto& m : batch) {
    const auto r = st::call(svc, "POST", "/cop", cop::encode(m));
    require(r.status == 200 && body(r)["duplicate"] == true, "re-ingest was not reported as duplicate");
    created_again += body(r)["created"].size();
  }
  const auto after = store.read([](const StoreView& v) { return v.total(); });
  const std::string detail = std::to_string(equal) + "/1000 roundtrips equal; first ingest created " +
                             std::to_string(created_first) + " entities, re-ingest created " +
                             std::to_string(created_again) + " (store " + std::to_string(total) + " -> " +
                             std::to_string(after) + ")";
  require(equal == 1000 && created_again == 0 && after == total, detail);
  return detail;
}

// ---------------------------------------------------------------- 8

std::string historical_locations() {
  StoreOptions o;
  Instant clock = st::t0();
  o.clock = [&clock] { return clock; };
  Store store(o);
  Service svc(store, config());
  std::vector<std::uint64_t> locs;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 3; ++i) {
    const auto r = st::call(svc, "POST", "/v1.0/Locations", to_field_map(st::random_location(rng)).dump());
    require(r.status == 201, "Location POST failed");
    locs.push_back(body(r)["@iot.id"].get<std::uint64_t>());
  }
  const auto t = st::call(svc, "POST", "/v1.0/Things", R"({"name":"patient 8","description":"walks"})");
  require(t.status == 201, "Thing POST failed");
  const auto thing = "/v1.0/Things(" + std::to_string(body(t)["@iot.id"].get<std::uint64_t>()) + ")";
  const std::vector<Instant> script{st::at_seconds(600), st::at_seconds(4200), st::at_seconds(86400)};
  for (int i = 0; i < 3; ++i) {
    clock = script[static_cast<std::size_t>(i)];
    json patch = {{"Locations", json::array({{{"@iot.id", locs[static_cast<std::size_t>(i)]}}})}};
    require(st::call(svc, "PATCH", thing, patch.dump()).status == 200, "move PATCH failed");
  }
  const auto hist = st::get(svc, thing + "/HistoricalLocations");
  require(hist.status == 200, "HistoricalLocations navigation failed");
  const auto items = body(hist)["value"];
  std::vector<std::string> times;
  for (const auto& h : items) times.push_back(h["time"].get<std::string>());
  std::vector<std::string> want;
  for (auto s : script) want.push_back(format_instant(s));
  std::string detail = std::to_string(items.size()) + " HistoricalLocations at";
  for (const auto& s : times) detail += " " + s;
  require(times == want, detail);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const EntityRef ref{EntityKind::HistoricalLocation, items[i]["@iot.id"].get<std::uint64_t>()};
    const auto hl = std::get<HistoricalLocation>(store.get(ref));
    require(hl.locations == std::vector<EntityRef>{{EntityKind::Location, locs[i]}},
            "HistoricalLocation " + std::to_string(i + 1) + " points at the wrong Location");
  }
  return detail;
}

// ---------------------------------------------------------------- 9

bench::BenchmarkReport full_run() {
  Store store;
  ServiceConfig c;
  c.base_url = std::string(kBase);
  Service svc(store, c);
  HttpServer server(svc, 16);
  const int port = server.bind("127.0.0.1", 0);
  server.start();
  bench::ExperimentConfig cfg;
  cfg.target = "http://127.0.0.1:" + std::to_string(port);
  cfg.protocols = {bench::Protocol::StaDefault, bench::Protocol::StaDataArray, bench::Protocol::Sos};
  cfg.seed = {1, 1, 1000};
  bench::seed_dataset(cfg);
  auto r = bench::run_scaling_experiment(cfg);
  server.stop();
  return r;
}

std::string benchmark_determinism() {
  const auto start = std::chrono::steady_clock::now();
  const auto a = full_run();
  const auto b = full_run();
  const double secs = seconds_since(start);
  require(a.steps.size() == 33 && b.steps.size() == 33, "expected 3 protocols x 11 steps");
  std::size_t differing = 0, decreasing = 0, aborted = 0;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].error || b.steps[i].error) ++aborted;
    if (a.steps[i].total_bytes() != b.steps[i].total_bytes()) ++differing;
    if (i % 11 && a.steps[i].total_bytes() < a.steps[i - 1].total_bytes()) ++decreasing;
  }
  const auto at = [&](bench::Protocol p, std::size_t step) {
    for (const auto& s : a.steps)
      if (s.protocol == p && s.step == step) return s.total_bytes();
    return std::size_t{0};
  };
  const std::string detail =
      "2 x 33 cells, " + std::to_string(differing) + " differing total_bytes, " + std::to_string(decreasing) +
      " decreases, " + std::to_string(aborted) + " aborted, step 1000 bytes sos/default/dataArray = " +
      std::to_string(at(bench::Protocol::Sos, 1000)) + "/" + std::to_string(at(bench::Protocol::StaDefault, 1000)) +
      "/" + std::to_string(at(bench::Protocol::StaDataArray, 1000)) + ", " + fmt(secs, 1) + " s (limit 300 s)";
  require(differing == 0 && decreasing == 0 && aborted == 0 && secs < 300, detail);
  return detail;
}

// ---------------------------------------------------------------- 10

pid_t spawn(bool spin) {
  const pid_t pid = ::fork();
  if (pid == 0) {
    if (spin) {
      volatile unsigned long x = 0;
      while (true) x = x + 1;
    }
    while (true) ::pause();
  }
  return pid;
}

double mean_cpu(bool spin) {
  const pid_t pid = spawn(spin);
  std::this_thread::sleep_for(100ms);
  const auto samples = bench::sample_cpu(pid, 250ms, 2000ms);
  ::kill(pid, SIGKILL);
  ::waitpid(pid, nullptr, 0);
  require(!samples.empty(), "no samples");
  double sum = 0;
  for (const auto& s : samples) sum += s.percent;
  return sum / static_cast<double>(samples.size());
}

std::string cpu_sampler_sanity() {
  require(bench::cpu_accounting_available(), "no /proc accounting on this platform");
  const double spin = mean_cpu(true);
  const double idle = mean_cpu(false);
  const std::string detail = "spinning child " + fmt(spin, 1) + "% (need > 80), sleeping child " + fmt(idle, 2) +
                             "% (need < 2)";
  require(spin > 80 && idle < 2, detail);
  return detail;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<std::string()>>> criteria{
      {1, dataarray_reduction},   {2, protocol_size_ordering}, {3, experiment_ceiling},
      {4, link_closure},     {5, crud_conformance},       {6, sos_ordering_rule},
      {7, cop_roundtrip_and_dedup}, {8, historical_locations}, {9, benchmark_determinism},
      {10, cpu_sampler_sanity}};
  int failures = 0;
  for (const auto& [n, run] : criteria) {
    std::string line;
    try {
      line = "PASS " + run();
    } catch (const Failed& e) {
      line = std::string("FAIL ") + e.what();
      ++failures;
    } catch (const std::exception& e) {
      line = std::string("FAIL unexpected error: ") + e.what();
      ++failures;
    }
    std::cout << "criterion " << n << ": " << line << std::endl;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
