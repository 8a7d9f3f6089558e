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

#include <gtest/gtest.h>

#include <future>
#include <random>

#include "http_support.hpp"
#include "sensorhub/server.hpp"
#include "test_support.hpp"

using namespace sensorhub;
namespace st = sensorhub::testing;

namespace {

constexpr const char* kBase = "http://sensorhub.test";

struct Api {
  Store store;
  Service svc{store, config()};

  static ServiceConfig config() {
    ServiceConfig c;
    c.base_url = std::string(kBase) + "/";
    return c;
  }

  Response get(const std::string& t) { return st::get(svc, t); }
  Response post(const std::string& t, const json& body) { return st::call(svc, "POST", t, body.dump()); }
  Response patch(const std::string& t, const json& body) { return st::call(svc, "PATCH", t, body.dump()); }
  Response del(const std::string& t) { return st::call(svc, "DELETE", t); }
};

json body_of(const Response& r) { return json::parse(r.body); }

}  // namespace

TEST(HttpLanding, ListsEightCollections) {
  Api api;
  const auto r = api.get("/");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type, "application/json");
  const auto j = body_of(r);
  ASSERT_EQ(j["value"].size(), kAllKinds.size());
  EXPECT_EQ(j["value"][0], (json{{"name", "Things"}, {"url", "http://sensorhub.test/v1.0/Things"}}));
  for (const auto& entry : j["value"]) {
    const auto url = entry["url"].get<std::string>();
    const auto page = api.get(url.substr(std::string(kBase).size()));
    EXPECT_EQ(page.status, 200) << url;
    EXPECT_TRUE(body_of(page)["value"].empty());
  }
  EXPECT_EQ(api.get("/v1.0").body, r.body);
}

TEST(HttpCrud, PostReturnsLocation) {
  Api api;
  const auto r = api.post("/v1.0/Things", {{"name", "COVID monitoring station"}, {"description", "Lobby"}});
  ASSERT_EQ(r.status, 201) << r.body;
  ASSERT_NE(r.header("Location"), nullptr);
  EXPECT_EQ(*r.header("Location"), "http://sensorhub.test/v1.0/Things(1)");
  const auto j = body_of(r);
  EXPECT_EQ(j["@iot.id"], 1);
  EXPECT_EQ(j["Datastreams@iot.navigationLink"], "http://sensorhub.test/v1.0/Things(1)/Datastreams");
}

TEST(HttpCrud, ValidationErrorsListEveryViolation) {
  Api api;
  const auto r = api.post("/v1.0/Locations", {{"description", 5}, {"location", {{"lat", 91}, {"lon", 0}}}});
  EXPECT_EQ(r.status, 422);
  const auto j = body_of(r);
  EXPECT_EQ(j["code"], "ValidationErrors");
  EXPECT_GE(j["violations"].size(), 3u);  // name missing, description type, lat range
  std::set<std::string> fields;
  for (const auto& v : j["violations"]) fields.insert(v["field"].get<std::string>());
  EXPECT_TRUE(fields.contains("name"));
  EXPECT_TRUE(fields.contains("description"));
  EXPECT_TRUE(fields.contains("location.lat"));
}

TEST(HttpCrud, StatusMapping) {
  Api api;
  const auto g = st::seed_graph(api.store, 1, 1, 10);
  EXPECT_EQ(api.post("/v1.0/Things", json::parse("[1]")).status, 422);
  EXPECT_EQ(st::call(api.svc, "POST", "/v1.0/Things", "{not json").status, 400);
  EXPECT_EQ(body_of(st::call(api.svc, "POST", "/v1.0/Things", "{not json"))["code"], "MalformedJson");
  EXPECT_EQ(api.get("/v1.0/Things(99)").status, 404);
  EXPECT_EQ(api.get("/v1.0/Widgets").status, 404);
  EXPECT_EQ(api.get("/v1.0/Things(0)").status, 404);
  EXPECT_EQ(api.get("/v1.0/Things(x)").status, 404);
  EXPECT_EQ(api.get("/v1.0/Things(1)/Sensors").status, 404);
  EXPECT_EQ(api.get("/elsewhere").status, 404);
  const auto put = st::call(api.svc, "PUT", "/v1.0/Things(1)", "{}");
  EXPECT_EQ(put.status, 405);
  ASSERT_NE(put.header("Allow"), nullptr);
  EXPECT_EQ(*put.header("Allow"), "GET, PATCH, DELETE");
  EXPECT_EQ(st::call(api.svc, "DELETE", "/v1.0/Things").status, 405);
  EXPECT_EQ(api.del("/v1.0/Sensors(" + std::to_string(g.sensor.id) + ")").status, 409);
  EXPECT_EQ(api.post("/v1.0/HistoricalLocations", {{"time", "2020-05-01T12:00:00Z"}}).status, 409);
  EXPECT_EQ(api.patch("/v1.0/Things(1)", {{"@iot.id", 7}}).status, 422);
  EXPECT_EQ(api.post("/v1.0/Datastreams", {{"name", "x"},
                                           {"unitOfMeasurement", json::object()},
                                           {"Thing", {{"@iot.id", 42}}},
                                           {"Sensor", {{"@iot.id", 1}}},
                                           {"ObservedProperty", {{"@iot.id", 1}}}})
                .status,
            422);
}

TEST(HttpQuery, ParameterHandling) {
  EXPECT_EQ(parse_query("").top, std::nullopt);
  const auto p = parse_query("%24top=3&$skip=2&$count=true&resultFormat=dataArray&foo=bar");
  EXPECT_EQ(p.top, 3u);
  EXPECT_EQ(p.skip, 2u);
  EXPECT_TRUE(p.count);
  EXPECT_EQ(p.format, ResultFormat::DataArray);
  for (const char* bad : {"$top=-1", "$top=abc", "$top=", "$filter=x", "$expand=Datastreams", "$top=1&$top=2",
                          "$count=yes", "resultFormat=csv", "$top=99999999999999999999999"}) {
    EXPECT_THROW(parse_query(bad), Error) << bad;
  }
}

TEST(HttpQuery, NavigationWindow) {
  Api api;
  st::seed_graph(api.store, 1, 1, 10);
  const auto r = api.get("/v1.0/Datastreams(1)/Observations?$top=5");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = body_of(r);
  ASSERT_EQ(j["value"].size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(j["value"][i]["@iot.id"], i + 1);
  EXPECT_EQ(j["@iot.nextLink"], "http://sensorhub.test/v1.0/Datastreams(1)/Observations?$top=5&$skip=5");
  const auto next = api.get("/v1.0/Datastreams(1)/Observations?$top=5&$skip=5");
  EXPECT_EQ(body_of(next)["value"][0]["@iot.id"], 6);
  EXPECT_FALSE(body_of(next).contains("@iot.nextLink"));
  EXPECT_EQ(api.get("/v1.0/Observations(1)/Datastream").status, 200);
  EXPECT_EQ(body_of(api.get("/v1.0/Observations?$count=true&$top=0"))["@iot.count"], 10);
}

TEST(HttpQuery, TopCeiling) {
  Api api;
  st::seed_graph(api.store, 1, 1, 3);
  EXPECT_EQ(api.get("/v1.0/Observations?$top=1000").status, 200);
  const auto r = api.get("/v1.0/Observations?$top=1001");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["code"], "BadParams");
  EXPECT_EQ(api.get("/v1.0/Things?resultFormat=dataArray").status, 400);
}

TEST(HttpSerialize, FieldOrderAndDeterminism) {
  Api api;
  st::seed_graph(api.store, 1, 1, 1);
  const auto a = api.get("/v1.0/Observations(1)");
  const auto b = api.get("/v1.0/Observations(1)");
  EXPECT_EQ(a.body, b.body);
  const auto j = nlohmann::ordered_json::parse(a.body);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  const std::vector<std::string> expected = {"@iot.id",
                                             "@iot.selfLink",
                                             "Datastream@iot.navigationLink",
                                             "FeatureOfInterest@iot.navigationLink",
                                             "phenomenonTime",
                                             "result",
                                             "resultTime"};
  EXPECT_EQ(keys, expected);
  EXPECT_EQ(parse_instant(j["phenomenonTime"].get<std::string>()), st::t0());
}

TEST(HttpSerialize, DataArrayShape) {
  Api api;
  st::seed_graph(api.store, 1, 2, 7);
  const auto j = body_of(api.get("/v1.0/Observations?resultFormat=dataArray"));
  ASSERT_EQ(j["value"].size(), 2u);
  std::size_t rows = 0;
  for (const auto& g : j["value"]) {
    EXPECT_EQ(g["components"], (json{"phenomenonTime", "result"}));
    EXPECT_EQ(g["dataArray@iot.count"], g["dataArray"].size());
    for (const auto& row : g["dataArray"]) EXPECT_EQ(row.size(), 2u);
    rows += g["dataArray"].size();
  }
  EXPECT_EQ(rows, 14u);
  EXPECT_EQ(j["value"][1]["Datastream@iot.navigationLink"], "http://sensorhub.test/v1.0/Datastreams(2)");

  Api empty;
  const auto e = body_of(empty.get("/v1.0/Observations?resultFormat=dataArray"));
  ASSERT_EQ(e["value"].size(), 1u);
  EXPECT_EQ(e["value"][0]["dataArray@iot.count"], 0);
  EXPECT_TRUE(e["value"][0]["dataArray"].empty());
}

TEST(HttpSerialize, DataArrayRatio) {
  Api api;
  st::seed_graph(api.store, 1, 1, 1000);
  for (int n : {100, 500, 1000}) {
    const auto def = api.get("/v1.0/Observations?$top=" + std::to_string(n));
    const auto arr = api.get("/v1.0/Observations?$top=" + std::to_string(n) + "&resultFormat=dataArray");
    const double ratio = static_cast<double>(arr.body.size()) / static_cast<double>(def.body.size());
    EXPECT_LE(ratio, 0.55) << n;
  }
}

TEST(HttpCrud, RandomConformance) {
  Api api;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    Entity e;
    switch (i % 4) {
      case 0: e = st::random_thing(rng); break;
      case 1: e = st::random_location(rng); break;
      case 2: e = st::random_sensor(rng); break;
      default: e = st::random_feature(rng); break;
    }
    const auto kind = kind_of(e);
    const auto coll = "/v1.0/" + std::string(collection_name(kind));
    const auto created = api.post(coll, to_field_map(e));
    ASSERT_EQ(created.status, 201) << created.body;
    const auto id = body_of(created)["@iot.id"].get<std::uint64_t>();
    set_id(e, id);
    const auto path = coll + "(" + std::to_string(id) + ")";

    // POST -> GET equality: the served document validates back to the original.
    const auto got = api.get(path);
    auto back = validate_entity(kind, body_of(got), FieldPolicy::Strict);
    ASSERT_TRUE(back.ok());
    set_id(*back.entity, id);
    EXPECT_EQ(*back.entity, e);

    // PATCH -> GET merge equality against a hand-merged field map.
    json patch = {{"name", st::random_text(rng)}, {"description", st::random_text(rng, 0)}};
    json expected = to_field_map(e);
    expected["name"] = patch["name"];
    expected["description"] = patch["description"];
    ASSERT_EQ(api.patch(path, patch).status, 200);
    auto after = validate_entity(kind, body_of(api.get(path)), FieldPolicy::Strict);
    ASSERT_TRUE(after.ok());
    EXPECT_EQ(to_field_map(*after.entity), expected);

    if (i % 3 == 0) {
      EXPECT_EQ(api.del(path).status, 200);
      EXPECT_EQ(api.get(path).status, 404);
    }
  }
}

TEST(HttpCrud, DeleteReturnsCascade) {
  Api api;
  const auto g = st::seed_graph(api.store, 1, 2, 3);
  const auto oracle = st::reachable_for_delete(api.store.all(), g.things[0]);
  const auto r = api.del("/v1.0/Things(1)");
  ASSERT_EQ(r.status, 200);
  std::set<std::string> links;
  const auto report = body_of(r);
  for (const auto& d : report["deleted"]) links.insert(d.get<std::string>());
  std::set<std::string> expected;
  for (const auto& ref : oracle) expected.insert(self_link(kBase, ref));
  EXPECT_EQ(links, expected);
}

TEST(HttpLinks, CrawlReachesEverything) {
  Api api;
  st::seed_graph(api.store, 3, 2, 10);
  const auto res = st::crawl(kBase, st::in_process(api.svc));
  EXPECT_TRUE(res.failures.empty()) << res.failures.front().first << " " << res.failures.front().second;
  for (const auto& e : api.store.all()) EXPECT_TRUE(res.entities.contains(self_link(kBase, ref_of(e))));
}

TEST(HttpSos, MountedAtSos) {
  Api api;
  sos::Procedure p;
  p.procedure_id = "ir-temp-001";
  p.name = "thermometer";
  sos::PropertySpec spec;
  spec.name = "bodyTemperature";
  spec.definition = "urn:x:bodyTemperature";
  p.observed_properties.push_back(spec);
  p.foi = {-86.6, 34.7};
  EXPECT_EQ(st::call(api.svc, "POST", "/sos", sos::register_sensor_xml(p)).status, 201);
  const auto ins = st::call(api.svc, "POST", "/sos", sos::insert_observation_xml("ir-temp-001", st::t0(), "38.2"));
  EXPECT_EQ(ins.status, 201);
  EXPECT_EQ(ins.content_type, "application/xml");
  const auto list = body_of(api.get("/v1.0/Observations"));
  ASSERT_EQ(list["value"].size(), 1u);
  EXPECT_EQ(list["value"][0]["result"], 38.2);
  EXPECT_EQ(st::call(api.svc, "GET", "/sos").status, 405);
}

TEST(HttpCop, IngestAndDedup) {
  Api api;
  const std::string doc =
      R"(<cop umi="u-1" symptoms="F-C" time="2020-05-01T12:00:00Z" patient="RP-19800101" lat="34.7" lon="-86.6"/>)";
  const auto first = st::call(api.svc, "POST", "/cop", doc);
  EXPECT_EQ(first.status, 201) << first.body;
  EXPECT_EQ(body_of(first)["duplicate"], false);
  const auto again = st::call(api.svc, "POST", "/cop", doc);
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(body_of(again)["duplicate"], true);
  EXPECT_EQ(body_of(api.get("/v1.0/Observations?$count=true"))["@iot.count"], 2);
  const auto bad = st::call(api.svc, "POST", "/cop", R"(<cop umi="u-2" symptoms="F--C"/>)");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(body_of(bad)["code"], "BadSymptomList");
}

TEST(HttpServerLive, ConcurrentRequests) {
  Store store;
  st::seed_graph(store, 2, 2, 50);
  Service svc(store, ServiceConfig{});
  HttpServer server(svc, 64);
  const int port = server.bind("127.0.0.1", 0);
  server.start();

  std::vector<std::future<std::vector<int>>> clients;
  for (int c = 0; c < 64; ++c) {
    clients.push_back(std::async(std::launch::async, [port, c] {
      httplib::Client cli("127.0.0.1", port);
      std::vector<int> statuses;
      for (int i = 0; i < 5; ++i) {
        auto res = (c + i) % 4 == 0 ? cli.Post("/v1.0/Things", R"({"name":"t"})", "application/json")
                                    : cli.Get("/v1.0/Observations?$top=20&$skip=" + std::to_string(i));
        statuses.push_back(res ? res->status : -1);
      }
      return statuses;
    }));
  }
  for (auto& f : clients)
    for (int s : f.get()) EXPECT_TRUE(s == 200 || s == 201) << s;

  httplib::Client cli("127.0.0.1", port);
  auto put = cli.Put("/v1.0/Things(1)", "{}", "application/json");
  ASSERT_TRUE(put);
  EXPECT_EQ(put->status, 405);
  auto landing = cli.Get("/");
  ASSERT_TRUE(landing);
  EXPECT_EQ(landing->get_header_value("Content-Type"), "application/json");
  server.stop();
}

TEST(HttpUrl, Split) {
  const auto u = Url::parse("http://localhost:8080/cop");
  EXPECT_EQ(u.origin, "http://localhost:8080");
  EXPECT_EQ(u.path, "/cop");
  EXPECT_EQ(Url::parse("http://h").path, "");
  EXPECT_THROW(Url::parse("https://h/x"), Error);
  EXPECT_THROW(Url::parse("nope"), Error);
}
