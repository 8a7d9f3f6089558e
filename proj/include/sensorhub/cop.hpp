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

/// Covid-on-Premises edge message codec (schema v1).
///
/// Canonical document, attributes always in this order:
///
///   <cop umi="..." symptoms="F-C" time="2020-05-01T12:00:00Z"
///        patient="RP-19800101" lat="34.7" lon="-86.6"/>
///
/// `patient` is optional. Symptom codes are single uppercase letters taken
/// from a SymptomTable. See schemas/cop/cop-v1.xsd.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sensorhub/store.hpp"
#include "sensorhub/validate.hpp"
#include "sensorhub/xml.hpp"

namespace sensorhub::cop {

inline constexpr std::string_view kUmiNamespace = "cop-umi";
inline constexpr std::string_view kSensorEncoding = "application/vnd.sensorhub.cop+xml";
inline constexpr std::string_view kThingKeyProperty = "copKey";

struct CopMessage {
  std::string umi;
  std::vector<char> symptoms;
  Instant timestamp;
  std::optional<std::string> patient;
  double lat = 0;
  double lon = 0;

  friend bool operator==(const CopMessage&, const CopMessage&) = default;
};

class SymptomTable {
 public:
  /// F=fever, C=cough, N=nausea, B=loss of breath.
  static SymptomTable defaults() {
    SymptomTable t;
    t.add('F', "fever");
    t.add('C', "cough");
    t.add('N', "nausea");
    t.add('B', "loss of breath");
    return t;
  }

  /// Parses `CODE = name` lines; blank lines and `#` comments are skipped.
  static SymptomTable parse(std::string_view text) {
    SymptomTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const auto code = trim(line.substr(0, eq == std::string::npos ? 0 : eq));
      const auto name = eq == std::string::npos ? std::string() : trim(line.substr(eq + 1));
      if (code.size() != 1 || name.empty())
        throw Error(Errc::BadConfig, "symptom table line " + std::to_string(lineno) + ": expected 'X = name'");
      t.add(code[0], name);
    }
    return t;
  }

  static SymptomTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot read symptom table " + path, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  void add(char code, std::string name) {
    if (code < 'A' || code > 'Z')
      throw Error(Errc::BadConfig, std::string("symptom code '") + code + "' is not an uppercase letter");
    codes_[code] = std::move(name);
  }

  bool contains(char code) const { return codes_.count(code) > 0; }

  const std::string& name(char code) const {
    auto it = codes_.find(code);
    if (it == codes_.end())
      throw Error(Errc::UnregisteredSymptom, std::string("symptom code '") + code + "' is not registered",
                  std::string(1, code));
    return it->second;
  }

  const std::map<char, std::string>& codes() const { return codes_; }

 private:
  std::map<char, std::string> codes_;
};

namespace detail {

inline std::string format_coordinate(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::optional<double> parse_coordinate(std::string_view s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline bool valid_patient(std::string_view p) {
  const auto dash = p.find('-');
  if (dash == std::string_view::npos || dash < 1 || dash > 4 || p.size() != dash + 9) return false;
  for (std::size_t i = 0; i < dash; ++i)
    if (p[i] < 'A' || p[i] > 'Z') return false;
  int digits[8];
  for (std::size_t i = 0; i < 8; ++i) {
    const char c = p[dash + 1 + i];
    if (c < '0' || c > '9') return false;
    digits[i] = c - '0';
  }
  const int y = digits[0] * 1000 + digits[1] * 100 + digits[2] * 10 + digits[3];
  const unsigned m = static_cast<unsigned>(digits[4] * 10 + digits[5]);
  const unsigned d = static_cast<unsigned>(digits[6] * 10 + digits[7]);
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}.ok();
}

inline std::string join_symptoms(const std::vector<char>& s) {
  std::string out;
  for (char c : s) {
    if (!out.empty()) out += '-';
    out += c;
  }
  return out;
}

inline std::vector<char> split_symptoms(std::string_view s, const SymptomTable& table) {
  std::vector<char> out;
  std::size_t pos = 0;
  while (true) {
    const auto dash = s.find('-', pos);
    const auto token = s.substr(pos, dash == std::string_view::npos ? std::string_view::npos : dash - pos);
    if (token.size() != 1 || token[0] < 'A' || token[0] > 'Z')
      throw Error(Errc::BadSymptomList, "symptom list '" + std::string(s) + "' has a malformed token", "symptoms");
    if (std::find(out.begin(), out.end(), token[0]) != out.end())
      throw Error(Errc::BadSymptomList, "symptom '" + std::string(token) + "' listed twice", "symptoms");
    if (!table.contains(token[0]))
      throw Error(Errc::BadSymptomList, "symptom '" + std::string(token) + "' is not registered", "symptoms");
    out.push_back(token[0]);
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  return out;
}

}  // namespace detail

/// Throws the error class matching the first broken invariant.
inline void validate(const CopMessage& m, const SymptomTable& table) {
  if (m.umi.empty()) throw Error(Errc::MissingAttribute, "umi is empty", "umi");
  if (m.symptoms.empty()) throw Error(Errc::BadSymptomList, "no symptoms listed", "symptoms");
  for (std::size_t i = 0; i < m.symptoms.size(); ++i) {
    table.name(m.symptoms[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (m.symptoms[j] == m.symptoms[i])
        throw Error(Errc::BadSymptomList, std::string("symptom '") + m.symptoms[i] + "' listed twice", "symptoms");
  }
  if (m.patient && !detail::valid_patient(*m.patient))
    throw Error(Errc::BadPatientGrammar, "patient '" + *m.patient + "' is not INITIALS-YYYYMMDD", "patient");
  if (!std::isfinite(m.lat) || !std::isfinite(m.lon) || !in_bounds(GeoPoint{m.lon, m.lat}))
    throw Error(Errc::BadCoordinate, "coordinates outside WGS84 bounds", "lat");
}

inline std::string encode(const CopMessage& m, const SymptomTable& table = SymptomTable::defaults()) {
  validate(m, table);
  xml::Element e{"cop", {}, {}, {}};
  e.attr("umi", m.umi);
  e.attr("symptoms", detail::join_symptoms(m.symptoms));
  e.attr("time", format_instant(m.timestamp));
  if (m.patient) e.attr("patient", *m.patient);
  e.attr("lat", detail::format_coordinate(m.lat));
  e.attr("lon", detail::format_coordinate(m.lon));
  return xml::to_string(e, false);
}

inline CopMessage decode(std::string_view document, const SymptomTable& table = SymptomTable::defaults(),
                         FieldPolicy policy = FieldPolicy::Lenient) {
  const auto root = xml::parse(document);
  if (root.name != "cop") throw Error(Errc::MalformedXml, "root element must be <cop>", root.name);
  if (!root.children.empty() || root.text.find_first_not_of(" \t\r\n") != std::string::npos)
    throw Error(Errc::MalformedXml, "<cop> must be an empty element", "cop");
  if (policy == FieldPolicy::Strict) {
    static constexpr std::string_view known[] = {"umi", "symptoms", "time", "patient", "lat", "lon"};
    for (const auto& [k, v] : root.attributes) {
      if (k == "xmlns" || k.starts_with("xmlns:")) continue;
      if (std::find(std::begin(known), std::end(known), k) == std::end(known))
        throw Error(Errc::UnknownAttribute, "unknown attribute '" + k + "'", k);
    }
  }
  const auto need = [&](const char* name) -> const std::string& {
    const auto* v = root.attribute(name);
    if (!v || v->empty()) throw Error(Errc::MissingAttribute, std::string("missing attribute ") + name, name);
    return *v;
  };

  CopMessage m;
  m.umi = need("umi");
  m.symptoms = detail::split_symptoms(need("symptoms"), table);
  const auto& time = need("time");
  auto t = parse_instant(time);
  if (!t) throw Error(Errc::BadTimestamp, "time '" + time + "' is not an ISO-8601 instant", "time");
  m.timestamp = *t;
  if (const auto* p = root.attribute("patient")) {
    if (!detail::valid_patient(*p))
      throw Error(Errc::BadPatientGrammar, "patient '" + *p + "' is not INITIALS-YYYYMMDD", "patient");
    m.patient = *p;
  }
  for (const char* axis : {"lat", "lon"}) {
    const auto& raw = need(axis);
    auto v = detail::parse_coordinate(raw);
    const double limit = axis[1] == 'a' ? 90 : 180;
    if (!v || *v < -limit || *v > limit)
      throw Error(Errc::BadCoordinate, std::string(axis) + " '" + raw + "' is out of range", axis);
    (axis[1] == 'a' ? m.lat : m.lon) = *v;
  }
  return m;
}

/// Key of the Thing a message is filed under: the patient when known,
/// otherwise the reporting station's coordinates.
inline std::string thing_key(const CopMessage& m) {
  if (m.patient) return "patient:" + *m.patient;
  return "station:" + detail::format_coordinate(m.lat) + "," + detail::format_coordinate(m.lon);
}

inline std::string symptom_definition(char code) { return std::string("urn:sensorhub:cop:symptom:") + code; }

/// Files a message into the store. A umi seen before is a no-op. Returns
/// every entity created, so a duplicate yields an empty list.
inline std::vector<EntityRef> map_to_sta(const CopMessage& m, Store& store,
                                         const SymptomTable& table = SymptomTable::defaults()) {
  validate(m, table);
  return store.write([&](Store::Txn& tx) {
    std::vector<EntityRef> created;
    if (!tx.claim_key(std::string(kUmiNamespace), m.umi)) return created;
    const auto make = [&](Entity e) {
      auto r = tx.create(std::move(e));
      created.push_back(r);
      return r;
    };

    const auto key = thing_key(m);
    EntityRef thing;
    if (const Entity* found = tx.find_first(EntityKind::Thing, [&](const Entity& e) {
          const auto& props = std::get<Thing>(e).properties;
          auto it = props.find(std::string(kThingKeyProperty));
          return it != props.end() && it->second == Scalar{key};
        })) {
      thing = ref_of(*found);
    } else {
      Thing t;
      t.name = m.patient ? *m.patient : "CoP station " + key.substr(8);
      t.description = m.patient ? "Monitored person" : "CoP reporting station";
      t.properties[std::string(kThingKeyProperty)] = Scalar{key};
      thing = make(std::move(t));
    }

    EntityRef sensor;
    if (const Entity* found = tx.find_first(EntityKind::Sensor, [](const Entity& e) {
          return std::get<Sensor>(e).encoding_type == kSensorEncoding;
        })) {
      sensor = ref_of(*found);
    } else {
      Sensor s;
      s.name = "CoP edge reporter";
      s.description = "Symptom reports received as CoP messages";
      s.encoding_type = std::string(kSensorEncoding);
      s.metadata = "cop-v1";
      sensor = make(std::move(s));
    }

    const GeoPoint where{m.lon, m.lat};
    EntityRef feature;
    if (const Entity* found = tx.find_first(EntityKind::FeatureOfInterest, [&](const Entity& e) {
          return std::get<FeatureOfInterest>(e).feature == where;
        })) {
      feature = ref_of(*found);
    } else {
      FeatureOfInterest f;
      f.name = "CoP site " + detail::format_coordinate(m.lat) + "," + detail::format_coordinate(m.lon);
      f.description = "Reported position";
      f.feature = where;
      feature = make(std::move(f));
    }

    for (char code : m.symptoms) {
      const auto def = symptom_definition(code);
      EntityRef property;
      if (const Entity* found = tx.find_first(EntityKind::ObservedProperty, [&](const Entity& e) {
            return std::get<ObservedProperty>(e).definition == def;
          })) {
        property = ref_of(*found);
      } else {
        ObservedProperty p;
        p.name = table.name(code);
        p.definition = def;
        p.description = "Presence of symptom " + table.name(code);
        property = make(std::move(p));
      }

      std::optional<EntityRef> stream;
      for (auto d : tx.referrers(thing, EntityKind::Datastream))
        if (std::get<Datastream>(tx.get(d)).observed_property == property) stream = d;
      if (!stream) {
        Datastream d;
        d.name = key + "/" + code;
        d.description = table.name(code) + " reports";
        d.unit = {"presence flag", "", "urn:sensorhub:unit:presence"};
        d.thing = thing;
        d.sensor = sensor;
        d.observed_property = property;
        stream = make(std::move(d));
      }

      Observation o;
      o.phenomenon_time = m.timestamp;
      o.result_time = m.timestamp;
      o.result = Scalar{true};
      o.datastream = *stream;
      o.feature_of_interest = feature;
      make(std::move(o));
    }
    return created;
  });
}

}  // namespace sensorhub::cop
