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

/// Observation-service XML facade over the shared entity store.
///
/// Three transactional operations, dispatched on the request's root
/// element: RegisterSensor, InsertObservation and GetObservation. A
/// procedure is registered once and is then backed by ordinary entities:
///
///   Thing             the observed subject (or an existing Thing)
///   Sensor            the procedure itself; its metadata holds the
///                     registration record as JSON
///   ObservedProperty  one per declared property, shared by definition
///   Datastream        one per declared property
///
/// so anything inserted here is also visible through the REST API. The
/// document grammar is described by schemas/sos/sos-v1.xsd.

#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sensorhub/serialize.hpp"
#include "sensorhub/store.hpp"
#include "sensorhub/xml.hpp"

namespace sensorhub::sos {

inline constexpr std::string_view kNamespace = "urn:sensorhub:sos:1.0";
inline constexpr std::string_view kProcedureEncoding = "application/vnd.sensorhub.sos-procedure+json";

enum class Operation { RegisterSensor, InsertObservation, GetObservation };

enum class ResultType { Numeric, Text, Boolean };

inline std::string_view to_string(ResultType t) {
  switch (t) {
    case ResultType::Numeric: return "numeric";
    case ResultType::Text: return "text";
    case ResultType::Boolean: return "boolean";
  }
  return "numeric";
}

inline std::optional<ResultType> result_type_from(std::string_view s) {
  if (s == "numeric") return ResultType::Numeric;
  if (s == "text") return ResultType::Text;
  if (s == "boolean") return ResultType::Boolean;
  return std::nullopt;
}

struct PropertySpec {
  std::string name;
  std::string definition;
  ResultType result_type = ResultType::Numeric;
  std::string uom_symbol;
  std::string uom_name;
  // filled in on registration
  EntityRef observed_property{EntityKind::ObservedProperty, 0};
  EntityRef datastream{EntityKind::Datastream, 0};
};

struct Procedure {
  std::string procedure_id;
  std::string name;
  std::string description;
  std::vector<PropertySpec> observed_properties;
  std::string foi_name;
  GeoPoint foi;
  Instant registered_at;
  EntityRef thing{EntityKind::Thing, 0};
  EntityRef sensor{EntityKind::Sensor, 0};
  std::optional<EntityRef> reuse_thing;
};

struct Envelope {
  Operation operation;
  xml::Element payload;
};

inline Envelope parse_envelope(std::string_view body) {
  auto root = xml::parse(body);
  const auto op = root.local_name();
  if (op == "RegisterSensor") return {Operation::RegisterSensor, std::move(root)};
  if (op == "InsertObservation") return {Operation::InsertObservation, std::move(root)};
  if (op == "GetObservation") return {Operation::GetObservation, std::move(root)};
  throw Error(Errc::MalformedXml, "unsupported request element <" + root.name + ">", root.name);
}

namespace detail {

inline const xml::Element& need_child(const xml::Element& parent, std::string_view name) {
  const auto* c = parent.child(name);
  if (!c) throw Error(Errc::MissingElement, "<" + parent.name + "> lacks <" + std::string(name) + ">", std::string(name));
  return *c;
}

inline std::string trimmed(std::string_view s) {
  while (!s.empty() && xml::detail::is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && xml::detail::is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

inline std::string need_text(const xml::Element& parent, std::string_view name) {
  auto t = trimmed(need_child(parent, name).text);
  if (t.empty()) throw Error(Errc::MissingElement, "<" + std::string(name) + "> is empty", std::string(name));
  return t;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string scalar_text(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) return format_double(v);
        else return v;
      },
      s);
}

inline GeoPoint parse_point(const xml::Element& foi) {
  const auto& pt = need_child(foi, "point");
  const auto* lat_s = pt.attribute("lat");
  const auto* lon_s = pt.attribute("lon");
  if (!lat_s) throw Error(Errc::MissingAttribute, "<point> lacks lat", "lat");
  if (!lon_s) throw Error(Errc::MissingAttribute, "<point> lacks lon", "lon");
  auto lat = parse_double(*lat_s);
  auto lon = parse_double(*lon_s);
  GeoPoint p{lon.value_or(1000), lat.value_or(1000)};
  if (!lat || !lon || !in_bounds(p)) throw Error(Errc::BadCoordinate, "point outside WGS84 bounds", "point");
  return p;
}

inline json procedure_record(const Procedure& p) {
  json props = json::array();
  for (const auto& s : p.observed_properties)
    props.push_back({{"name", s.name},
                     {"definition", s.definition},
                     {"resultType", to_string(s.result_type)},
                     {"uom", s.uom_symbol},
                     {"uomName", s.uom_name},
                     {"observedProperty", s.observed_property.id},
                     {"datastream", s.datastream.id}});
  return {{"procedureId", p.procedure_id},
          {"foiName", p.foi_name},
          {"foi", {p.foi.lon, p.foi.lat}},
          {"registeredAt", format_instant(p.registered_at)},
          {"thing", p.thing.id},
          {"observedProperties", props}};
}

/// Rebuilds a Procedure from its backing Sensor, or nullopt if the Sensor
/// is not a registered procedure.
inline std::optional<Procedure> procedure_from_sensor(const Sensor& s) {
  if (s.encoding_type != kProcedureEncoding) return std::nullopt;
  const json j = json::parse(s.metadata, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  Procedure p;
  p.procedure_id = j.value("procedureId", "");
  p.name = s.name;
  p.description = s.description;
  p.foi_name = j.value("foiName", "");
  if (const auto& f = j.value("foi", json::array()); f.size() == 2) p.foi = {f[0].get<double>(), f[1].get<double>()};
  p.registered_at = parse_instant(j.value("registeredAt", "")).value_or(Instant{});
  p.thing = {EntityKind::Thing, j.value("thing", std::uint64_t{0})};
  p.sensor = {EntityKind::Sensor, s.id};
  for (const auto& o : j.value("observedProperties", json::array())) {
    PropertySpec spec;
    spec.name = o.value("name", "");
    spec.definition = o.value("definition", "");
    spec.result_type = result_type_from(o.value("resultType", "numeric")).value_or(ResultType::Numeric);
    spec.uom_symbol = o.value("uom", "");
    spec.uom_name = o.value("uomName", "");
    spec.observed_property = {EntityKind::ObservedProperty, o.value("observedProperty", std::uint64_t{0})};
    spec.datastream = {EntityKind::Datastream, o.value("datastream", std::uint64_t{0})};
    p.observed_properties.push_back(std::move(spec));
  }
  return p;
}

}  // namespace detail

/// Finds a registered procedure by id within one consistent view.
inline std::optional<Procedure> find_procedure(const StoreView& view, std::string_view id) {
  for (const auto& [sid, e] : view.table(EntityKind::Sensor)) {
    const auto& s = std::get<Sensor>(e);
    if (s.encoding_type != kProcedureEncoding) continue;
    auto p = detail::procedure_from_sensor(s);
    if (p && p->procedure_id == id) return p;
  }
  return std::nullopt;
}

/// Reads a RegisterSensor payload into a Procedure (no store access).
inline Procedure parse_register(const xml::Element& root) {
  if (root.local_name() != "RegisterSensor")
    throw Error(Errc::MalformedXml, "expected <RegisterSensor>", root.name);
  const auto& proc = detail::need_child(root, "procedure");
  Procedure p;
  const auto* id = proc.attribute("id");
  if (!id || detail::trimmed(*id).empty())
    throw Error(Errc::MissingAttribute, "<procedure> lacks an id", "id");
  p.procedure_id = detail::trimmed(*id);
  p.name = detail::need_text(proc, "name");
  if (const auto* d = proc.child("description")) p.description = detail::trimmed(d->text);
  for (const auto* op : proc.children_named("observedProperty")) {
    PropertySpec spec;
    spec.name = detail::trimmed(op->text);
    if (spec.name.empty())
      throw Error(Errc::MissingElement, "<observedProperty> is empty", "observedProperty");
    const auto* def = op->attribute("definition");
    spec.definition = def ? *def : "urn:sensorhub:property:" + spec.name;
    if (const auto* rt = op->attribute("resultType")) {
      auto t = result_type_from(*rt);
      if (!t) throw Error(Errc::MalformedXml, "unknown resultType '" + *rt + "'", "resultType");
      spec.result_type = *t;
    }
    if (const auto* u = op->attribute("uom")) spec.uom_symbol = *u;
    if (const auto* u = op->attribute("uomName")) spec.uom_name = *u;
    for (const auto& other : p.observed_properties)
      if (other.name == spec.name)
        throw Error(Errc::MalformedXml, "observed property '" + spec.name + "' declared twice", "observedProperty");
    p.observed_properties.push_back(std::move(spec));
  }
  if (p.observed_properties.empty())
    throw Error(Errc::MissingElement, "a procedure needs at least one <observedProperty>", "observedProperty");
  const auto& foi = detail::need_child(proc, "featureOfInterest");
  const auto* fname = foi.attribute("name");
  p.foi_name = fname ? *fname : p.procedure_id + " site";
  p.foi = detail::parse_point(foi);
  if (const auto* th = proc.child("thing")) {
    const auto* tid = th->attribute("id");
    std::uint64_t v = 0;
    if (!tid || std::from_chars(tid->data(), tid->data() + tid->size(), v).ec != std::errc() || v == 0)
      throw Error(Errc::MissingAttribute, "<thing> needs a positive id", "id");
    p.reuse_thing = EntityRef{EntityKind::Thing, v};
  }
  return p;
}

struct InsertRequest {
  std::string procedure_id;
  std::optional<std::string> observed_property;
  TimeValue phenomenon_time;
  std::optional<Instant> result_time;
  std::string result;
};

inline InsertRequest parse_insert(const xml::Element& root) {
  if (root.local_name() != "InsertObservation")
    throw Error(Errc::MalformedXml, "expected <InsertObservation>", root.name);
  InsertRequest r;
  r.procedure_id = detail::need_text(root, "procedure");
  const auto& obs = detail::need_child(root, "observation");
  if (const auto* op = obs.child("observedProperty")) r.observed_property = detail::trimmed(op->text);
  const auto pt = detail::need_text(obs, "phenomenonTime");
  auto tv = parse_time_value(pt);
  if (!tv) throw Error(Errc::BadTimestamp, "bad phenomenonTime '" + pt + "'", "phenomenonTime");
  if (const auto* iv = std::get_if<Interval>(&*tv); iv && iv->start > iv->end)
    throw Error(Errc::BadTimestamp, "phenomenonTime interval ends before it starts", "phenomenonTime");
  r.phenomenon_time = *tv;
  if (const auto* rt = obs.child("resultTime")) {
    auto t = parse_instant(detail::trimmed(rt->text));
    if (!t) throw Error(Errc::BadTimestamp, "bad resultTime", "resultTime");
    r.result_time = t;
  }
  const auto* res = obs.child("result");
  if (!res) throw Error(Errc::MissingElement, "<observation> lacks <result>", "result");
  r.result = detail::trimmed(res->text);
  return r;
}

struct GetRequest {
  std::string procedure_id;
  std::optional<Interval> time_range;
  std::optional<std::string> observed_property;
};

inline GetRequest parse_get(const xml::Element& root) {
  if (root.local_name() != "GetObservation") throw Error(Errc::MalformedXml, "expected <GetObservation>", root.name);
  GetRequest g;
  g.procedure_id = detail::need_text(root, "procedure");
  if (const auto* tf = root.child("temporalFilter")) {
    const auto* b = tf->attribute("begin");
    const auto* e = tf->attribute("end");
    if (!b) throw Error(Errc::MissingAttribute, "<temporalFilter> lacks begin", "begin");
    if (!e) throw Error(Errc::MissingAttribute, "<temporalFilter> lacks end", "end");
    auto bt = parse_instant(*b);
    auto et = parse_instant(*e);
    if (!bt || !et || *bt > *et) throw Error(Errc::BadTimestamp, "bad temporalFilter", "temporalFilter");
    g.time_range = Interval{*bt, *et};
  }
  if (const auto* op = root.child("observedProperty")) g.observed_property = detail::trimmed(op->text);
  return g;
}

/// Request builders, used by clients (benchmark seeding, tests, CLI).
inline std::string register_sensor_xml(const Procedure& p) {
  xml::Element root{"RegisterSensor", {{"xmlns", std::string(kNamespace)}}, {}, {}};
  auto& proc = root.add("procedure").attr("id", p.procedure_id);
  proc.add("name").set_text(p.name);
  if (!p.description.empty()) proc.add("description").set_text(p.description);
  for (const auto& s : p.observed_properties) {
    auto& op = proc.add("observedProperty").attr("definition", s.definition).attr("resultType",
                                                                                    std::string(to_string(s.result_type)));
    if (!s.uom_symbol.empty()) op.attr("uom", s.uom_symbol);
    if (!s.uom_name.empty()) op.attr("uomName", s.uom_name);
    op.set_text(s.name);
  }
  auto& foi = proc.add("featureOfInterest").attr("name", p.foi_name);
  foi.add("point").attr("lat", detail::format_double(p.foi.lat)).attr("lon", detail::format_double(p.foi.lon));
  if (p.reuse_thing) proc.add("thing").attr("id", std::to_string(p.reuse_thing->id));
  return xml::to_string(root);
}

inline std::string insert_observation_xml(std::string_view procedure_id, const TimeValue& when,
                                          std::string_view result,
                                          std::optional<std::string_view> observed_property = std::nullopt) {
  xml::Element root{"InsertObservation", {{"xmlns", std::string(kNamespace)}}, {}, {}};
  root.add("procedure").set_text(std::string(procedure_id));
  auto& obs = root.add("observation");
  if (observed_property) obs.add("observedProperty").set_text(std::string(*observed_property));
  obs.add("phenomenonTime").set_text(format_time_value(when));
  obs.add("result").set_text(std::string(result));
  return xml::to_string(root);
}

inline std::string get_observation_xml(std::string_view procedure_id,
                                       std::optional<Interval> range = std::nullopt) {
  xml::Element root{"GetObservation", {{"xmlns", std::string(kNamespace)}}, {}, {}};
  root.add("procedure").set_text(std::string(procedure_id));
  if (range)
    root.add("temporalFilter").attr("begin", format_instant(range->start)).attr("end", format_instant(range->end));
  return xml::to_string(root);
}

struct XmlResponse {
  int status = 200;
  std::string body;
};

class Facade {
 public:
  Facade(Store& store, std::string base_url) : store_(store), base_(std::move(base_url)) {}

  /// Registers a procedure and creates its backing entities atomically.
  Procedure register_sensor(const Envelope& env) {
    if (env.operation != Operation::RegisterSensor)
      throw Error(Errc::MalformedXml, "envelope is not a RegisterSensor request");
    Procedure p = parse_register(env.payload);
    return store_.write([&](Store::Txn& tx) {
      if (find_procedure(tx, p.procedure_id))
        throw Error(Errc::DuplicateProcedure, "procedure '" + p.procedure_id + "' is already registered",
                    p.procedure_id);
      p.registered_at = tx.now();
      if (p.reuse_thing) {
        if (!tx.find(*p.reuse_thing))
          throw Error(Errc::DanglingRef, to_string(*p.reuse_thing) + " does not exist", "Thing");
        p.thing = *p.reuse_thing;
      } else {
        Thing t;
        t.name = p.name;
        t.description = p.description.empty() ? "Registered procedure " + p.procedure_id : p.description;
        t.properties["sosProcedure"] = Scalar{p.procedure_id};
        p.thing = tx.create(std::move(t));
      }
      Sensor s;
      s.name = p.name;
      s.description = p.description;
      s.encoding_type = std::string(kProcedureEncoding);
      s.metadata = "{}";
      p.sensor = tx.create(s);
      for (auto& spec : p.observed_properties) {
        if (const Entity* existing = tx.find_first(EntityKind::ObservedProperty, [&](const Entity& e) {
              return std::get<ObservedProperty>(e).definition == spec.definition;
            })) {
          spec.observed_property = ref_of(*existing);
        } else {
          ObservedProperty op;
          op.name = spec.name;
          op.definition = spec.definition;
          spec.observed_property = tx.create(std::move(op));
        }
        Datastream d;
        d.name = p.procedure_id + ":" + spec.name;
        d.description = "Observations of " + spec.name + " by procedure " + p.procedure_id;
        d.unit = {spec.uom_name, spec.uom_symbol, ""};
        d.thing = p.thing;
        d.sensor = p.sensor;
        d.observed_property = spec.observed_property;
        spec.datastream = tx.create(std::move(d));
      }
      tx.update(p.sensor, json{{"metadata", detail::procedure_record(p).dump()}});
      return p;
    });
  }

  /// Inserts one observation for an already registered procedure.
  EntityRef insert_observation(const Envelope& env) {
    if (env.operation != Operation::InsertObservation)
      throw Error(Errc::MalformedXml, "envelope is not an InsertObservation request");
    const InsertRequest req = parse_insert(env.payload);
    return store_.write([&](Store::Txn& tx) {
      auto p = find_procedure(tx, req.procedure_id);
      if (!p)
        throw Error(Errc::UnknownProcedure,
                    "procedure '" + req.procedure_id + "' must be registered before observations are inserted",
                    req.procedure_id);
      const PropertySpec* spec = nullptr;
      if (req.observed_property) {
        for (const auto& s : p->observed_properties)
          if (s.name == *req.observed_property || s.definition == *req.observed_property) spec = &s;
        if (!spec)
          throw Error(Errc::MissingElement, "procedure has no property '" + *req.observed_property + "'",
                      "observedProperty");
      } else if (p->observed_properties.size() == 1) {
        spec = &p->observed_properties.front();
      } else {
        throw Error(Errc::MissingElement, "procedure declares several properties; name one", "observedProperty");
      }

      Observation o;
      o.phenomenon_time = req.phenomenon_time;
      o.result_time = req.result_time.value_or(end_of(req.phenomenon_time));
      o.result = parse_result(req.result, spec->result_type);
      o.datastream = spec->datastream;
      o.feature_of_interest = feature_for(tx, *p);
      return tx.create(std::move(o));
    });
  }

  /// Every matching observation of the procedure as one XML document.
  std::string get_observation(std::string_view procedure_id, std::optional<Interval> range = std::nullopt,
                              std::optional<std::string> observed_property = std::nullopt) const {
    return store_.read([&](const StoreView& view) {
      auto p = find_procedure(view, procedure_id);
      if (!p)
        throw Error(Errc::UnknownProcedure, "procedure '" + std::string(procedure_id) + "' is not registered",
                    std::string(procedure_id));
      return render_observations(view, *p, range, observed_property);
    });
  }

  /// HTTP-level entry point: body in, status + XML out.
  XmlResponse handle(std::string_view body) {
    try {
      const auto env = parse_envelope(body);
      switch (env.operation) {
        case Operation::RegisterSensor: {
          const auto p = register_sensor(env);
          xml::Element root{"RegisterSensorResponse", {{"xmlns", std::string(kNamespace)}}, {}, {}};
          root.add("assignedProcedure").set_text(p.procedure_id);
          root.add("thing").attr("href", self_link(base_, p.thing));
          root.add("sensor").attr("href", self_link(base_, p.sensor));
          for (const auto& s : p.observed_properties)
            root.add("datastream")
                .attr("observedProperty", s.name)
                .attr("id", std::to_string(s.datastream.id))
                .attr("href", self_link(base_, s.datastream));
          return {201, xml::to_string(root)};
        }
        case Operation::InsertObservation: {
          const auto ref = insert_observation(env);
          xml::Element root{"InsertObservationResponse", {{"xmlns", std::string(kNamespace)}}, {}, {}};
          root.add("observation").attr("id", std::to_string(ref.id)).attr("href", self_link(base_, ref));
          return {201, xml::to_string(root)};
        }
        case Operation::GetObservation: {
          const auto req = parse_get(env.payload);
          return {200, get_observation(req.procedure_id, req.time_range, req.observed_property)};
        }
      }
    } catch (const Error& e) {
      return {status_for(e.code()), exception_report(e)};
    }
    return {500, ""};
  }

  static int status_for(Errc code) {
    switch (code) {
      case Errc::DuplicateProcedure: return 409;
      case Errc::StoreFull: return 507;
      case Errc::IoError:
      case Errc::CorruptStore: return 500;
      default: return 400;
    }
  }

  static std::string exception_report(const Error& e) {
    xml::Element root{"ExceptionReport", {{"xmlns", std::string(kNamespace)}}, {}, {}};
    auto& ex = root.add("Exception").attr("exceptionCode", std::string(sensorhub::to_string(e.code())));
    if (!e.subject().empty()) ex.attr("locator", e.subject());
    ex.add("ExceptionText").set_text(e.what());
    return xml::to_string(root);
  }

 private:
  static Scalar parse_result(const std::string& text, ResultType type) {
    switch (type) {
      case ResultType::Numeric: {
        auto v = detail::parse_double(text);
        if (!v) throw Error(Errc::BadResult, "result '" + text + "' is not numeric", "result");
        return Scalar{*v};
      }
      case ResultType::Boolean:
        if (text == "true" || text == "1") return Scalar{true};
        if (text == "false" || text == "0") return Scalar{false};
        throw Error(Errc::BadResult, "result '" + text + "' is not a boolean", "result");
      case ResultType::Text: return Scalar{text};
    }
    return Scalar{text};
  }

  static EntityRef feature_for(Store::Txn& tx, const Procedure& p) {
    if (const Entity* f = tx.find_first(EntityKind::FeatureOfInterest, [&](const Entity& e) {
          return std::get<FeatureOfInterest>(e).feature == p.foi;
        }))
      return ref_of(*f);
    FeatureOfInterest f;
    f.name = p.foi_name;
    f.description = "Feature of procedure " + p.procedure_id;
    f.feature = p.foi;
    return tx.create(std::move(f));
  }

  static bool overlaps(const TimeValue& t, const Interval& range) {
    return start_of(t) <= range.end && end_of(t) >= range.start;
  }

  std::string render_observations(const StoreView& view, const Procedure& p, const std::optional<Interval>& range,
                                  const std::optional<std::string>& only) const {
    struct Row {
      const Observation* obs;
      const PropertySpec* spec;
    };
    std::vector<Row> rows;
    for (const auto& spec : p.observed_properties) {
      if (only && spec.name != *only && spec.definition != *only) continue;
      for (const auto& r : view.referrers(spec.datastream, EntityKind::Observation)) {
        const auto& o = std::get<Observation>(view.get(r));
        if (!range || overlaps(o.phenomenon_time, *range)) rows.push_back({&o, &spec});
      }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.obs->id < b.obs->id; });

    xml::Element root{"GetObservationResponse",
                      {{"xmlns", std::string(kNamespace)},
                       {"procedure", p.procedure_id},
                       {"count", std::to_string(rows.size())}},
                      {},
                      {}};
    for (const auto& row : rows) {
      const auto& o = *row.obs;
      auto& el = root.add("observation").attr("id", std::to_string(o.id));
      el.add("procedure").set_text(p.procedure_id);
      el.add("procedureName").set_text(p.name);
      el.add("offering").set_text("offering:" + p.procedure_id);
      el.add("observedProperty").attr("definition", row.spec->definition).set_text(row.spec->name);
      auto& foi = el.add("featureOfInterest");
      if (o.feature_of_interest) {
        if (const Entity* fe = view.find(*o.feature_of_interest)) {
          const auto& f = std::get<FeatureOfInterest>(*fe);
          foi.attr("name", f.name);
          foi.add("point")
              .attr("lat", detail::format_double(f.feature.lat))
              .attr("lon", detail::format_double(f.feature.lon));
        }
      }
      el.add("phenomenonTime").set_text(format_time_value(o.phenomenon_time));
      el.add("resultTime").set_text(format_instant(o.result_time));
      auto& res = el.add("result");
      if (!row.spec->uom_symbol.empty()) res.attr("uom", row.spec->uom_symbol);
      res.set_text(detail::scalar_text(o.result));
    }
    return xml::to_string(root);
  }

  Store& store_;
  std::string base_;
};

}  // namespace sensorhub::sos
