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

/// Conversion between untyped JSON field maps and typed entities.
///
/// The field-map form is what clients POST and PATCH: plain entity fields
/// plus relation references written as `{"@iot.id": n}` objects (or arrays
/// of them for Thing/HistoricalLocation Locations). `to_field_map` produces
/// exactly that form, so `validate_entity(kind, to_field_map(e))` always
/// succeeds for a valid `e`.

#pragma once

#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sensorhub/entity.hpp"

namespace sensorhub {

using json = nlohmann::json;

/// Strict mode reports unknown fields; lenient mode drops them.
enum class FieldPolicy { Lenient, Strict };

struct ValidationResult {
  std::optional<Entity> entity;
  std::vector<Violation> violations;

  bool ok() const { return entity.has_value(); }
};

inline json scalar_to_json(const Scalar& s) {
  return std::visit([](const auto& v) { return json(v); }, s);
}

inline std::optional<Scalar> scalar_from_json(const json& j) {
  switch (j.type()) {
    case json::value_t::boolean: return Scalar{j.get<bool>()};
    case json::value_t::number_integer: return Scalar{j.get<std::int64_t>()};
    case json::value_t::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) return Scalar{static_cast<double>(u)};
      return Scalar{static_cast<std::int64_t>(u)};
    }
    case json::value_t::number_float: return Scalar{j.get<double>()};
    case json::value_t::string: return Scalar{j.get<std::string>()};
    default: return std::nullopt;
  }
}

inline json ref_to_json(const EntityRef& r) { return json{{"@iot.id", r.id}}; }

inline json point_to_json(const GeoPoint& p) {
  return json{{"type", "Point"}, {"coordinates", json::array({p.lon, p.lat})}};
}

namespace detail {

/// Reads fields out of one JSON object and accumulates violations.
class FieldReader {
 public:
  FieldReader(const json& obj, FieldPolicy policy, std::vector<Violation>& out)
      : obj_(obj), policy_(policy), out_(out) {}

  void fail(Errc code, std::string field, std::string message) {
    out_.push_back({code, std::move(field), std::move(message)});
  }

  /// Returns the value under `key`, treating explicit null as absent.
  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::string text(const std::string& key, bool required, bool non_empty = false) {
    const json* v = find(key);
    if (!v) {
      if (required) fail(Errc::MissingField, key, "required field is missing");
      return {};
    }
    if (!v->is_string()) {
      fail(Errc::BadFieldType, key, "expected text");
      return {};
    }
    auto s = v->get<std::string>();
    if (non_empty && s.empty()) fail(Errc::EmptyRequired, key, "must not be empty");
    return s;
  }

  std::optional<EntityRef> ref(const std::string& key, EntityKind kind, bool required) {
    const json* v = find(key);
    if (!v) {
      if (required) fail(Errc::MissingField, key, "required relation is missing");
      return std::nullopt;
    }
    return parse_ref(*v, key, kind);
  }

  std::optional<EntityRef> parse_ref(const json& v, const std::string& field, EntityKind kind) {
    if (!v.is_object()) {
      fail(Errc::BadFieldType, field, "expected {\"@iot.id\": <id>}");
      return std::nullopt;
    }
    auto it = v.find("@iot.id");
    if (it == v.end()) {
      fail(Errc::MissingField, field + ".@iot.id", "reference lacks @iot.id");
      return std::nullopt;
    }
    if (!it->is_number_integer() || it->get<std::int64_t>() <= 0) {
      fail(Errc::BadFieldType, field + ".@iot.id", "id must be a positive integer");
      return std::nullopt;
    }
    return EntityRef{kind, it->get<std::uint64_t>()};
  }

  std::vector<EntityRef> ref_list(const std::string& key, EntityKind kind, bool required_non_empty) {
    std::vector<EntityRef> out;
    const json* v = find(key);
    if (!v) {
      if (required_non_empty) fail(Errc::MissingField, key, "required relation is missing");
      return out;
    }
    if (!v->is_array()) {
      fail(Errc::BadFieldType, key, "expected an array of references");
      return out;
    }
    std::set<EntityRef> dedup;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (auto r = parse_ref((*v)[i], key + "[" + std::to_string(i) + "]", kind)) {
        if (dedup.insert(*r).second) out.push_back(*r);
      }
    }
    if (required_non_empty && v->empty()) fail(Errc::EmptyRequired, key, "must list at least one entry");
    return out;
  }

  std::optional<GeoPoint> point(const std::string& key) {
    const json* v = find(key);
    if (!v) {
      fail(Errc::MissingField, key, "required geometry is missing");
      return std::nullopt;
    }
    if (!v->is_object()) {
      fail(Errc::BadFieldType, key, "expected a GeoJSON Point");
      return std::nullopt;
    }
    GeoPoint p;
    if (v->contains("coordinates")) {
      const auto& c = (*v)["coordinates"];
      if (v->value("type", std::string{}) != "Point") {
        fail(Errc::BadFieldType, key + ".type", "only Point geometries are supported");
        return std::nullopt;
      }
      if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
        fail(Errc::BadFieldType, key + ".coordinates", "expected [lon, lat]");
        return std::nullopt;
      }
      p.lon = c[0].get<double>();
      p.lat = c[1].get<double>();
    } else if (v->contains("lat") && v->contains("lon")) {
      const auto& lat = (*v)["lat"];
      const auto& lon = (*v)["lon"];
      if (!lat.is_number() || !lon.is_number()) {
        fail(Errc::BadFieldType, key, "lat and lon must be numbers");
        return std::nullopt;
      }
      p.lat = lat.get<double>();
      p.lon = lon.get<double>();
    } else {
      fail(Errc::BadFieldType, key, "expected a GeoJSON Point or {lat, lon}");
      return std::nullopt;
    }
    bool ok = true;
    if (!(p.lat >= -90.0 && p.lat <= 90.0)) {
      fail(Errc::OutOfRange, key + ".lat", "latitude outside [-90, 90]");
      ok = false;
    }
    if (!(p.lon >= -180.0 && p.lon <= 180.0)) {
      fail(Errc::OutOfRange, key + ".lon", "longitude outside [-180, 180]");
      ok = false;
    }
    return ok ? std::optional<GeoPoint>(p) : std::nullopt;
  }

  std::optional<Instant> instant(const std::string& key, bool required) {
    const json* v = find(key);
    if (!v) {
      if (required) fail(Errc::MissingField, key, "required time is missing");
      return std::nullopt;
    }
    if (!v->is_string()) {
      fail(Errc::BadFieldType, key, "expected ISO-8601 text");
      return std::nullopt;
    }
    auto t = parse_instant(v->get<std::string>());
    if (!t) fail(Errc::BadFieldType, key, "not an ISO-8601 UTC instant");
    return t;
  }

  /// Reports keys nobody asked for. Annotation keys (`@iot.*`,
  /// `X@iot.navigationLink`) are always accepted since clients echo them.
  void finish() {
    if (policy_ != FieldPolicy::Strict) return;
    for (const auto& [k, _] : obj_.items()) {
      if (seen_.count(k) || k.find("@iot.") != std::string::npos) continue;
      fail(Errc::UnknownField, k, "unknown field");
    }
  }

 private:
  const json& obj_;
  FieldPolicy policy_;
  std::vector<Violation>& out_;
  std::set<std::string> seen_;
};

}  // namespace detail

/// Turns an untyped field map into a typed entity, reporting every
/// violation found rather than stopping at the first.
inline ValidationResult validate_entity(EntityKind kind, const json& candidate,
                                        FieldPolicy policy = FieldPolicy::Lenient) {
  ValidationResult res;
  if (!candidate.is_object()) {
    res.violations.push_back({Errc::BadFieldType, "", "entity body must be a JSON object"});
    return res;
  }
  auto& v = res.violations;
  detail::FieldReader r(candidate, policy, v);
  std::optional<Entity> built;

  switch (kind) {
    case EntityKind::Thing: {
      Thing t;
      t.name = r.text("name", true, true);
      t.description = r.text("description", false);
      if (const json* props = r.find("properties")) {
        if (!props->is_object()) {
          r.fail(Errc::BadFieldType, "properties", "expected a flat object");
        } else {
          for (const auto& [k, val] : props->items()) {
            if (k.empty()) {
              r.fail(Errc::EmptyRequired, "properties", "property keys must not be empty");
              continue;
            }
            if (auto s = scalar_from_json(val)) {
              t.properties.emplace(k, std::move(*s));
            } else {
              r.fail(Errc::BadFieldType, "properties." + k, "property values must be text, number or boolean");
            }
          }
        }
      }
      t.locations = r.ref_list("Locations", EntityKind::Location, false);
      built = std::move(t);
      break;
    }
    case EntityKind::Location:
    case EntityKind::FeatureOfInterest: {
      const bool is_loc = kind == EntityKind::Location;
      const std::string geom_key = is_loc ? "location" : "feature";
      auto name = r.text("name", true, true);
      auto desc = r.text("description", false);
      auto enc = r.text("encodingType", false);
      if (enc.empty()) enc = std::string(kGeoJson);
      if (enc != kGeoJson) r.fail(Errc::BadFieldType, "encodingType", "only application/geo+json is supported");
      auto p = r.point(geom_key);
      if (is_loc) {
        Location l;
        l.name = std::move(name);
        l.description = std::move(desc);
        l.encoding_type = std::move(enc);
        if (p) l.location = *p;
        built = std::move(l);
      } else {
        FeatureOfInterest f;
        f.name = std::move(name);
        f.description = std::move(desc);
        f.encoding_type = std::move(enc);
        if (p) f.feature = *p;
        built = std::move(f);
      }
      break;
    }
    case EntityKind::HistoricalLocation: {
      HistoricalLocation h;
      if (auto t = r.instant("time", true)) h.time = *t;
      if (auto th = r.ref("Thing", EntityKind::Thing, true)) h.thing = *th;
      h.locations = r.ref_list("Locations", EntityKind::Location, true);
      built = std::move(h);
      break;
    }
    case EntityKind::Sensor: {
      Sensor s;
      s.name = r.text("name", true, true);
      s.description = r.text("description", false);
      s.encoding_type = r.text("encodingType", false);
      s.metadata = r.text("metadata", false);
      built = std::move(s);
      break;
    }
    case EntityKind::ObservedProperty: {
      ObservedProperty o;
      o.name = r.text("name", true, true);
      o.definition = r.text("definition", true, true);
      o.description = r.text("description", false);
      built = std::move(o);
      break;
    }
    case EntityKind::Datastream: {
      Datastream d;
      d.name = r.text("name", true, true);
      d.description = r.text("description", false);
      if (const json* u = r.find("unitOfMeasurement")) {
        if (!u->is_object()) {
          r.fail(Errc::BadFieldType, "unitOfMeasurement", "expected {name, symbol, definition}");
        } else {
          std::vector<Violation> unit_errors;
          detail::FieldReader ur(*u, policy, unit_errors);
          d.unit.name = ur.text("name", false);
          d.unit.symbol = ur.text("symbol", false);
          d.unit.definition = ur.text("definition", false);
          ur.finish();
          for (auto& e : unit_errors) {
            e.field = "unitOfMeasurement." + e.field;
            v.push_back(std::move(e));
          }
        }
      } else {
        r.fail(Errc::MissingField, "unitOfMeasurement", "required field is missing");
      }
      if (auto x = r.ref("Thing", EntityKind::Thing, true)) d.thing = *x;
      if (auto x = r.ref("Sensor", EntityKind::Sensor, true)) d.sensor = *x;
      if (auto x = r.ref("ObservedProperty", EntityKind::ObservedProperty, true)) d.observed_property = *x;
      built = std::move(d);
      break;
    }
    case EntityKind::Observation: {
      Observation o;
      if (const json* pt = r.find("phenomenonTime")) {
        auto tv = pt->is_string() ? parse_time_value(pt->get<std::string>()) : std::nullopt;
        if (!tv) {
          r.fail(Errc::BadFieldType, "phenomenonTime", "expected an ISO-8601 instant or start/end interval");
        } else {
          if (const auto* iv = std::get_if<Interval>(&*tv); iv && iv->start > iv->end)
            r.fail(Errc::BadInterval, "phenomenonTime", "interval start is after its end");
          o.phenomenon_time = *tv;
        }
      } else {
        r.fail(Errc::MissingField, "phenomenonTime", "required time is missing");
      }
      if (const json* res_v = r.find("result")) {
        if (auto s = scalar_from_json(*res_v))
          o.result = std::move(*s);
        else
          r.fail(Errc::BadFieldType, "result", "result must be a scalar");
      } else {
        r.fail(Errc::MissingField, "result", "required field is missing");
      }
      if (auto rt = r.instant("resultTime", false))
        o.result_time = *rt;
      else
        o.result_time = end_of(o.phenomenon_time);
      if (auto x = r.ref("Datastream", EntityKind::Datastream, true)) o.datastream = *x;
      o.feature_of_interest = r.ref("FeatureOfInterest", EntityKind::FeatureOfInterest, false);
      built = std::move(o);
      break;
    }
  }

  r.finish();
  if (v.empty()) res.entity = std::move(built);
  return res;
}

/// Field-map form of an entity including its held references, without id.
inline json to_field_map(const Entity& e) {
  json j = json::object();
  std::visit(
      [&j](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        auto refs = [](const std::vector<EntityRef>& v) {
          json a = json::array();
          for (const auto& r : v) a.push_back(ref_to_json(r));
          return a;
        };
        if constexpr (std::is_same_v<T, Thing>) {
          j["name"] = x.name;
          j["description"] = x.description;
          json props = json::object();
          for (const auto& [k, val] : x.properties) props[k] = scalar_to_json(val);
          j["properties"] = std::move(props);
          j["Locations"] = refs(x.locations);
        } else if constexpr (std::is_same_v<T, Location>) {
          j["name"] = x.name;
          j["description"] = x.description;
          j["encodingType"] = x.encoding_type;
          j["location"] = point_to_json(x.location);
        } else if constexpr (std::is_same_v<T, HistoricalLocation>) {
          j["time"] = format_instant(x.time);
          j["Thing"] = ref_to_json(x.thing);
          j["Locations"] = refs(x.locations);
        } else if constexpr (std::is_same_v<T, Sensor>) {
          j["name"] = x.name;
          j["description"] = x.description;
          j["encodingType"] = x.encoding_type;
          j["metadata"] = x.metadata;
        } else if constexpr (std::is_same_v<T, ObservedProperty>) {
          j["name"] = x.name;
          j["definition"] = x.definition;
          j["description"] = x.description;
        } else if constexpr (std::is_same_v<T, Datastream>) {
          j["name"] = x.name;
          j["description"] = x.description;
          j["unitOfMeasurement"] = {{"name", x.unit.name}, {"symbol", x.unit.symbol}, {"definition", x.unit.definition}};
          j["Thing"] = ref_to_json(x.thing);
          j["Sensor"] = ref_to_json(x.sensor);
          j["ObservedProperty"] = ref_to_json(x.observed_property);
        } else if constexpr (std::is_same_v<T, Observation>) {
          j["phenomenonTime"] = format_time_value(x.phenomenon_time);
          j["result"] = scalar_to_json(x.result);
          j["resultTime"] = format_instant(x.result_time);
          j["Datastream"] = ref_to_json(x.datastream);
          if (x.feature_of_interest) j["FeatureOfInterest"] = ref_to_json(*x.feature_of_interest);
        } else if constexpr (std::is_same_v<T, FeatureOfInterest>) {
          j["name"] = x.name;
          j["description"] = x.description;
          j["encodingType"] = x.encoding_type;
          j["feature"] = point_to_json(x.feature);
        }
      },
      e);
  return j;
}

/// True for field-map keys that hold references rather than values. Plain
/// fields are lower camel case, relation fields are entity names.
inline bool is_relation_field(std::string_view field) {
  for (std::string_view h : {"Locations", "Thing", "Sensor", "ObservedProperty", "Datastream", "FeatureOfInterest"})
    if (field == h) return true;
  return false;
}

}  // namespace sensorhub
