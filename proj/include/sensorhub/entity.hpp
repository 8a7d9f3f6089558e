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

/// Sensing data model: the eight entity kinds, their value types and the
/// fixed relationship graph between them. Nothing here knows about storage
/// or transport.

#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sensorhub/error.hpp"
#include "sensorhub/time.hpp"

namespace sensorhub {

enum class EntityKind : std::uint8_t {
  Thing,
  Location,
  HistoricalLocation,
  Sensor,
  ObservedProperty,
  Datastream,
  Observation,
  FeatureOfInterest,
};

inline constexpr std::size_t kEntityKindCount = 8;

inline constexpr std::array<EntityKind, kEntityKindCount> kAllKinds = {
    EntityKind::Thing,      EntityKind::Location,    EntityKind::HistoricalLocation,
    EntityKind::Sensor,     EntityKind::ObservedProperty, EntityKind::Datastream,
    EntityKind::Observation, EntityKind::FeatureOfInterest,
};

constexpr std::string_view kind_name(EntityKind k) noexcept {
  constexpr std::array<std::string_view, kEntityKindCount> names = {
      "Thing",  "Location",         "HistoricalLocation", "Sensor",
      "ObservedProperty", "Datastream", "Observation", "FeatureOfInterest"};
  return names[static_cast<std::size_t>(k)];
}

constexpr std::string_view collection_name(EntityKind k) noexcept {
  constexpr std::array<std::string_view, kEntityKindCount> names = {
      "Things",  "Locations",          "HistoricalLocations", "Sensors",
      "ObservedProperties", "Datastreams", "Observations", "FeaturesOfInterest"};
  return names[static_cast<std::size_t>(k)];
}

constexpr std::optional<EntityKind> kind_from_name(std::string_view s) noexcept {
  for (auto k : kAllKinds)
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

constexpr std::optional<EntityKind> kind_from_collection(std::string_view s) noexcept {
  for (auto k : kAllKinds)
    if (collection_name(k) == s) return k;
  return std::nullopt;
}

struct EntityRef {
  EntityKind kind{};
  std::uint64_t id = 0;

  friend auto operator<=>(const EntityRef&, const EntityRef&) = default;
};

inline std::string to_string(const EntityRef& r) {
  return std::string(kind_name(r.kind)) + "(" + std::to_string(r.id) + ")";
}

/// Scalar payloads: Thing properties and Observation results.
using Scalar = std::variant<bool, std::int64_t, double, std::string>;

struct GeoPoint {
  double lon = 0;
  double lat = 0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline bool in_bounds(const GeoPoint& p) {
  return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

inline constexpr std::string_view kGeoJson = "application/geo+json";

struct Thing {
  std::uint64_t id = 0;
  std::string name;
  std::string description;
  std::map<std::string, Scalar> properties;
  std::vector<EntityRef> locations;

  friend bool operator==(const Thing&, const Thing&) = default;
};

struct Location {
  std::uint64_t id = 0;
  std::string name;
  std::string description;
  std::string encoding_type{kGeoJson};
  GeoPoint location;

  friend bool operator==(const Location&, const Location&) = default;
};

struct HistoricalLocation {
  std::uint64_t id = 0;
  Instant time;
  EntityRef thing{EntityKind::Thing, 0};
  std::vector<EntityRef> locations;

  friend bool operator==(const HistoricalLocation&, const HistoricalLocation&) = default;
};

struct Sensor {
  std::uint64_t id = 0;
  std::string name;
  std::string description;
  std::string encoding_type;
  std::string metadata;

  friend bool operator==(const Sensor&, const Sensor&) = default;
};

struct ObservedProperty {
  std::uint64_t id = 0;
  std::string name;
  std::string definition;
  std::string description;

  friend bool operator==(const ObservedProperty&, const ObservedProperty&) = default;
};

struct UnitOfMeasurement {
  std::string name;
  std::string symbol;
  std::string definition;

  friend bool operator==(const UnitOfMeasurement&, const UnitOfMeasurement&) = default;
};

struct Datastream {
  std::uint64_t id = 0;
  std::string name;
  std::string description;
  UnitOfMeasurement unit;
  EntityRef thing{EntityKind::Thing, 0};
  EntityRef sensor{EntityKind::Sensor, 0};
  EntityRef observed_property{EntityKind::ObservedProperty, 0};

  friend bool operator==(const Datastream&, const Datastream&) = default;
};

struct Observation {
  std::uint64_t id = 0;
  TimeValue phenomenon_time;
  Scalar result;
  Instant result_time;
  EntityRef datastream{EntityKind::Datastream, 0};
  // Absent only between validation and storage; the store fills it in.
  std::optional<EntityRef> feature_of_interest;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct FeatureOfInterest {
  std::uint64_t id = 0;
  std::string name;
  std::string description;
  std::string encoding_type{kGeoJson};
  GeoPoint feature;

  friend bool operator==(const FeatureOfInterest&, const FeatureOfInterest&) = default;
};

/// Alternative index equals the EntityKind value.
using Entity = std::variant<Thing, Location, HistoricalLocation, Sensor, ObservedProperty, Datastream,
                            Observation, FeatureOfInterest>;

inline EntityKind kind_of(const Entity& e) { return static_cast<EntityKind>(e.index()); }

inline std::uint64_t id_of(const Entity& e) {
  return std::visit([](const auto& x) { return x.id; }, e);
}

inline void set_id(Entity& e, std::uint64_t id) {
  std::visit([id](auto& x) { x.id = id; }, e);
}

inline EntityRef ref_of(const Entity& e) { return {kind_of(e), id_of(e)}; }

/// A reference held by an entity, labelled with the relation name as seen
/// from the holder (e.g. a Datastream holds "Sensor").
struct HeldRef {
  std::string_view relation;
  EntityRef target;
};

inline std::vector<HeldRef> held_refs(const Entity& e) {
  std::vector<HeldRef> out;
  std::visit(
      [&out](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Thing>) {
          for (const auto& l : x.locations) out.push_back({"Locations", l});
        } else if constexpr (std::is_same_v<T, HistoricalLocation>) {
          out.push_back({"Thing", x.thing});
          for (const auto& l : x.locations) out.push_back({"Locations", l});
        } else if constexpr (std::is_same_v<T, Datastream>) {
          out.push_back({"Thing", x.thing});
          out.push_back({"Sensor", x.sensor});
          out.push_back({"ObservedProperty", x.observed_property});
        } else if constexpr (std::is_same_v<T, Observation>) {
          out.push_back({"Datastream", x.datastream});
          if (x.feature_of_interest) out.push_back({"FeatureOfInterest", *x.feature_of_interest});
        }
      },
      e);
  return out;
}

// ---------------------------------------------------------------------------
// Relationship graph

enum class Cardinality { OneToMany, ManyToOne, ManyToMany };

constexpr std::string_view to_string(Cardinality c) noexcept {
  switch (c) {
    case Cardinality::OneToMany: return "1:many";
    case Cardinality::ManyToOne: return "many:1";
    case Cardinality::ManyToMany: return "many:many";
  }
  return "?";
}

enum class Participation { Optional, Mandatory, SystemManaged };

constexpr std::string_view to_string(Participation p) noexcept {
  switch (p) {
    case Participation::Optional: return "optional";
    case Participation::Mandatory: return "mandatory";
    case Participation::SystemManaged: return "system-managed";
  }
  return "?";
}

struct Relation {
  EntityKind source;
  std::string_view name;
  EntityKind target;
  Cardinality cardinality;
  Participation participation;
  /// Name of the same link when walked from the target side.
  std::string_view inverse_name;

  bool mandatory() const { return participation == Participation::Mandatory; }
  friend bool operator==(const Relation&, const Relation&) = default;
};

inline constexpr std::array<Relation, 8> kRelationships = {{
    {EntityKind::Thing, "Locations", EntityKind::Location, Cardinality::ManyToMany, Participation::Optional,
     "Things"},
    {EntityKind::Thing, "HistoricalLocations", EntityKind::HistoricalLocation, Cardinality::OneToMany,
     Participation::SystemManaged, "Thing"},
    {EntityKind::Thing, "Datastreams", EntityKind::Datastream, Cardinality::OneToMany, Participation::Optional,
     "Thing"},
    {EntityKind::Datastream, "Sensor", EntityKind::Sensor, Cardinality::ManyToOne, Participation::Mandatory,
     "Datastreams"},
    {EntityKind::Datastream, "ObservedProperty", EntityKind::ObservedProperty, Cardinality::ManyToOne,
     Participation::Mandatory, "Datastreams"},
    {EntityKind::Datastream, "Observations", EntityKind::Observation, Cardinality::OneToMany,
     Participation::Optional, "Datastream"},
    {EntityKind::Observation, "FeatureOfInterest", EntityKind::FeatureOfInterest, Cardinality::ManyToOne,
     Participation::Mandatory, "Observations"},
    {EntityKind::Observation, "Datastream", EntityKind::Datastream, Cardinality::ManyToOne,
     Participation::Mandatory, "Observations"},
}};

inline std::vector<Relation> relationship_table() { return {kRelationships.begin(), kRelationships.end()}; }

/// Looks a relation up by its source kind and name.
inline std::optional<Relation> find_relation(EntityKind source, std::string_view name) {
  for (const auto& r : kRelationships)
    if (r.source == source && r.name == name) return r;
  return std::nullopt;
}

/// Relations in which `kind` takes part on the target side.
inline std::vector<Relation> relations_targeting(EntityKind kind) {
  std::vector<Relation> out;
  for (const auto& r : kRelationships)
    if (r.target == kind) out.push_back(r);
  return out;
}

/// One hop that can be followed from an entity of kind `source`.
struct NavigationLink {
  EntityKind source;
  std::string_view name;
  EntityKind target;
  bool to_many;

  friend bool operator==(const NavigationLink&, const NavigationLink&) = default;
};

/// Every relation walkable from `kind`, in either direction of the table,
/// sorted by name.
inline std::vector<NavigationLink> navigation_links(EntityKind kind) {
  std::vector<NavigationLink> out;
  auto add = [&out](NavigationLink l) {
    for (const auto& e : out)
      if (e.name == l.name) return;
    out.push_back(l);
  };
  for (const auto& r : kRelationships) {
    if (r.source == kind) add({kind, r.name, r.target, r.cardinality != Cardinality::ManyToOne});
    if (r.target == kind) add({kind, r.inverse_name, r.source, r.cardinality != Cardinality::OneToMany});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

inline std::optional<NavigationLink> find_navigation(EntityKind kind, std::string_view name) {
  for (const auto& l : navigation_links(kind))
    if (l.name == name) return l;
  return std::nullopt;
}

/// Builds the history record for a Thing whose location set changed.
/// Referential checks belong to the caller; only the non-empty rule is
/// enforced here.
inline HistoricalLocation derive_historical_location(EntityRef thing, std::vector<EntityRef> new_locations,
                                                     Instant at) {
  if (thing.kind != EntityKind::Thing || thing.id == 0)
    throw Error(Errc::DanglingRef, "historical location needs a Thing", "Thing");
  if (new_locations.empty())
    throw Error(Errc::EmptyLocations, "historical location needs at least one Location", "Locations");
  for (const auto& l : new_locations)
    if (l.kind != EntityKind::Location || l.id == 0)
      throw Error(Errc::DanglingRef, "not a Location reference: " + to_string(l), "Locations");
  HistoricalLocation h;
  h.time = at;
  h.thing = thing;
  h.locations = std::move(new_locations);
  return h;
}

}  // namespace sensorhub
