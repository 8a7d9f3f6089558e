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

#include <set>

#include "sensorhub/entity.hpp"
#include "sensorhub/validate.hpp"
#include "test_support.hpp"

namespace sensorhub {
namespace {

using testing::at_seconds;

bool has_violation(const ValidationResult& r, Errc code, std::string_view field_prefix = {}) {
  for (const auto& v : r.violations)
    if (v.code == code && v.field.rfind(field_prefix, 0) == 0) return true;
  return false;
}

TEST(Time, FormatsAndParsesUtc) {
  const auto t = at_seconds(0);
  EXPECT_EQ(format_instant(t), "2020-05-01T12:00:00Z");
  EXPECT_EQ(format_instant(t + std::chrono::milliseconds{7}), "2020-05-01T12:00:00.007Z");
  EXPECT_EQ(parse_instant("2020-05-01T12:00:00Z"), t);
  EXPECT_EQ(parse_instant("2020-05-01T14:30:00+02:30"), t);
  EXPECT_EQ(parse_instant("2020-05-01T12:00:00.0071234Z"), t + std::chrono::milliseconds{7});
}

TEST(Time, RejectsMalformedInstants) {
  for (const char* bad : {"", "2020-05-01", "2020-05-01T12:00:00", "2020-02-30T00:00:00Z", "2020-05-01T24:00:00Z",
                          "2020-05-01T12:00:00.Z", "2020-05-01T12:00:00Zjunk", "20-05-01T12:00:00Z"})
    EXPECT_FALSE(parse_instant(bad).has_value()) << bad;
}

TEST(Time, IntervalRoundTrip) {
  const TimeValue iv = Interval{at_seconds(0), at_seconds(60)};
  EXPECT_EQ(format_time_value(iv), "2020-05-01T12:00:00Z/2020-05-01T12:01:00Z");
  EXPECT_EQ(parse_time_value(format_time_value(iv)), iv);
}

TEST(Kinds, EightKindsWithFixedCollections) {
  EXPECT_EQ(kAllKinds.size(), 8u);
  const std::vector<std::string_view> expected = {"Things",      "Locations",          "HistoricalLocations",
                                                  "Sensors",     "ObservedProperties", "Datastreams",
                                                  "Observations", "FeaturesOfInterest"};
  for (std::size_t i = 0; i < kAllKinds.size(); ++i) {
    EXPECT_EQ(collection_name(kAllKinds[i]), expected[i]);
    EXPECT_EQ(kind_from_collection(expected[i]), kAllKinds[i]);
  }
}

TEST(Validate, MonitoringStationThingIsValid) {
  const json body = {{"name", "COVID monitoring station"}, {"description", "street corner unit"},
                     {"properties", json::object()}};
  auto r = validate_entity(EntityKind::Thing, body);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(std::get<Thing>(*r.entity).name, "COVID monitoring station");
}

TEST(Validate, LatitudeOutOfRange) {
  const json body = {{"name", "x"}, {"encodingType", "application/geo+json"}, {"location", {{"lat", 91}, {"lon", 0}}}};
  auto r = validate_entity(EntityKind::Location, body);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_violation(r, Errc::OutOfRange, "location.lat"));
}

TEST(Validate, ReversedIntervalRejected) {
  const json body = {{"phenomenonTime", "2020-05-01T13:00:00Z/2020-05-01T12:00:00Z"},
                     {"result", 38.5},
                     {"Datastream", {{"@iot.id", 1}}}};
  auto r = validate_entity(EntityKind::Observation, body);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_violation(r, Errc::BadInterval, "phenomenonTime"));
}

TEST(Validate, ReportsEveryViolation) {
  const json body = {{"name", ""}, {"location", {{"type", "Point"}, {"coordinates", {200, -95}}}}};
  auto r = validate_entity(EntityKind::Location, body);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_violation(r, Errc::EmptyRequired, "name"));
  EXPECT_TRUE(has_violation(r, Errc::OutOfRange, "location.lat"));
  EXPECT_TRUE(has_violation(r, Errc::OutOfRange, "location.lon"));
  EXPECT_EQ(r.violations.size(), 3u);
}

TEST(Validate, MissingAndMistypedFields) {
  auto r = validate_entity(EntityKind::Datastream, json{{"name", 5}});
  EXPECT_TRUE(has_violation(r, Errc::BadFieldType, "name"));
  EXPECT_TRUE(has_violation(r, Errc::MissingField, "unitOfMeasurement"));
  EXPECT_TRUE(has_violation(r, Errc::MissingField, "Thing"));
  EXPECT_TRUE(has_violation(r, Errc::MissingField, "Sensor"));
  EXPECT_TRUE(has_violation(r, Errc::MissingField, "ObservedProperty"));
}

TEST(Validate, ResultMustBeScalar) {
  const json body = {{"phenomenonTime", "2020-05-01T12:00:00Z"}, {"result", json::array({1, 2})},
                     {"Datastream", {{"@iot.id", 1}}}};
  EXPECT_TRUE(has_violation(validate_entity(EntityKind::Observation, body), Errc::BadFieldType, "result"));
}

TEST(Validate, PropertiesMustBeFlat) {
  const json body = {{"name", "t"}, {"properties", {{"nested", {{"a", 1}}}, {"", 2}}}};
  auto r = validate_entity(EntityKind::Thing, body);
  EXPECT_TRUE(has_violation(r, Errc::BadFieldType, "properties.nested"));
  EXPECT_TRUE(has_violation(r, Errc::EmptyRequired, "properties"));
}

TEST(Validate, StrictModeFlagsUnknownFields) {
  const json body = {{"name", "t"}, {"colour", "red"}, {"@iot.id", 4}, {"Datastreams@iot.navigationLink", "x"}};
  EXPECT_TRUE(validate_entity(EntityKind::Thing, body, FieldPolicy::Lenient).ok());
  auto strict = validate_entity(EntityKind::Thing, body, FieldPolicy::Strict);
  ASSERT_FALSE(strict.ok());
  ASSERT_EQ(strict.violations.size(), 1u);
  EXPECT_EQ(strict.violations[0].code, Errc::UnknownField);
  EXPECT_EQ(strict.violations[0].field, "colour");
}

TEST(Validate, ResultTimeDefaultsToPhenomenonEnd) {
  const json body = {{"phenomenonTime", "2020-05-01T12:00:00Z/2020-05-01T12:05:00Z"}, {"result", true},
                     {"Datastream", {{"@iot.id", 3}}}};
  auto r = validate_entity(EntityKind::Observation, body);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(std::get<Observation>(*r.entity).result_time, at_seconds(300));
}

TEST(Relations, TableHasEightEntries) {
  // Counted from the enumerated graph: Thing has 3 outgoing relations,
  // Datastream 3, Observation 2.
  int by_source[kEntityKindCount] = {};
  for (const auto& r : relationship_table()) ++by_source[static_cast<int>(r.source)];
  EXPECT_EQ(by_source[static_cast<int>(EntityKind::Thing)], 3);
  EXPECT_EQ(by_source[static_cast<int>(EntityKind::Datastream)], 3);
  EXPECT_EQ(by_source[static_cast<int>(EntityKind::Observation)], 2);
  EXPECT_EQ(relationship_table().size(), 8u);
}

TEST(Relations, DatastreamSensorIsMandatoryManyToOne) {
  auto r = find_relation(EntityKind::Datastream, "Sensor");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->target, EntityKind::Sensor);
  EXPECT_EQ(r->cardinality, Cardinality::ManyToOne);
  EXPECT_TRUE(r->mandatory());
}

TEST(Relations, HistoricalLocationIsSystemManaged) {
  auto rels = relations_targeting(EntityKind::HistoricalLocation);
  ASSERT_EQ(rels.size(), 1u);
  EXPECT_EQ(rels[0].source, EntityKind::Thing);
  EXPECT_EQ(rels[0].name, "HistoricalLocations");
  EXPECT_EQ(rels[0].cardinality, Cardinality::OneToMany);
  EXPECT_EQ(rels[0].participation, Participation::SystemManaged);
}

TEST(Relations, TotalOverKinds) {
  std::set<EntityKind> seen;
  for (const auto& r : relationship_table()) {
    seen.insert(r.source);
    seen.insert(r.target);
  }
  EXPECT_EQ(seen.size(), kEntityKindCount);
}

TEST(Relations, MandatoryRelationsPointAtKnownKinds) {
  for (const auto& r : relationship_table()) {
    if (!r.mandatory()) continue;
    EXPECT_TRUE(r.source == EntityKind::Datastream || r.source == EntityKind::Observation);
    EXPECT_TRUE(find_navigation(r.source, r.name).has_value());
    EXPECT_TRUE(find_navigation(r.target, r.inverse_name).has_value());
  }
}

TEST(Relations, NavigationLinks) {
  auto names = [](EntityKind k) {
    std::vector<std::string_view> out;
    for (const auto& l : navigation_links(k)) out.push_back(l.name);
    return out;
  };
  using V = std::vector<std::string_view>;
  EXPECT_EQ(names(EntityKind::Thing), (V{"Datastreams", "HistoricalLocations", "Locations"}));
  EXPECT_EQ(names(EntityKind::Datastream), (V{"Observations", "ObservedProperty", "Sensor", "Thing"}));
  EXPECT_EQ(names(EntityKind::Observation), (V{"Datastream", "FeatureOfInterest"}));
  EXPECT_EQ(names(EntityKind::Location), (V{"Things"}));
  EXPECT_FALSE(find_navigation(EntityKind::Thing, "Sensor"));
}

TEST(HistoricalLocation, DirectConstruction) {
  const EntityRef thing{EntityKind::Thing, 1};
  const EntityRef l2{EntityKind::Location, 2};
  auto h = derive_historical_location(thing, {l2}, at_seconds(5));
  EXPECT_EQ(h.thing, thing);
  EXPECT_EQ(h.locations, std::vector<EntityRef>{l2});
  EXPECT_EQ(h.time, at_seconds(5));
}

TEST(HistoricalLocation, EmptyLocationsRejected) {
  try {
    derive_historical_location({EntityKind::Thing, 1}, {}, at_seconds(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyLocations);
  }
}

// validate(parse(serialize(e))) holds for random entities of every kind.
TEST(Validate, FieldMapRoundTripProperty) {
  std::mt19937_64 rng(20200501);
  const EntityRef thing{EntityKind::Thing, 3}, sensor{EntityKind::Sensor, 4}, prop{EntityKind::ObservedProperty, 5},
      ds{EntityKind::Datastream, 6}, foi{EntityKind::FeatureOfInterest, 7};
  for (int i = 0; i < 500; ++i) {
    std::vector<Entity> samples;
    auto t = testing::random_thing(rng);
    if (i % 2) t.locations = {{EntityKind::Location, 1}, {EntityKind::Location, 9}};
    samples.emplace_back(t);
    samples.emplace_back(testing::random_location(rng));
    samples.emplace_back(derive_historical_location(thing, {{EntityKind::Location, 2}}, testing::random_instant(rng)));
    samples.emplace_back(testing::random_sensor(rng));
    samples.emplace_back(testing::random_property(rng));
    samples.emplace_back(testing::make_datastream(thing, sensor, prop, testing::random_text(rng)));
    Observation o = testing::make_observation(ds, testing::random_instant(rng), testing::random_scalar(rng), foi);
    if (i % 3 == 0) {
      const auto a = testing::random_instant(rng);
      o.phenomenon_time = Interval{a, a + std::chrono::seconds{i}};
    }
    samples.emplace_back(o);
    samples.emplace_back(testing::random_feature(rng));

    for (const auto& e : samples) {
      const json wire = json::parse(to_field_map(e).dump());
      auto r = validate_entity(kind_of(e), wire, FieldPolicy::Strict);
      ASSERT_TRUE(r.ok()) << wire.dump() << " -> " << (r.violations.empty() ? "" : r.violations[0].message);
      EXPECT_EQ(*r.entity, e) << wire.dump();
    }
  }
}

}  // namespace
}  // namespace sensorhub
