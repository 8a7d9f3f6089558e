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

/// Wire encodings of the sensing API.
///
/// Field order is fixed so that two serializations of the same data are
/// byte-identical: `@iot.id`, `@iot.selfLink`, navigation links sorted by
/// relation name, then entity fields sorted by name.

#pragma once

#include <map>
#include <string>
#include <string_view>

#include "sensorhub/store.hpp"

namespace sensorhub {

using ordered_json = nlohmann::ordered_json;

inline constexpr std::string_view kApiVersionPath = "/v1.0";

inline std::string collection_url(std::string_view base, EntityKind kind) {
  std::string s(base);
  s += kApiVersionPath;
  s += '/';
  s += collection_name(kind);
  return s;
}

inline std::string self_link(std::string_view base, EntityRef ref) {
  return collection_url(base, ref.kind) + "(" + std::to_string(ref.id) + ")";
}

inline ordered_json serialize_entity(const Entity& e, std::string_view base) {
  const auto ref = ref_of(e);
  const auto self = self_link(base, ref);
  ordered_json out = ordered_json::object();
  out["@iot.id"] = ref.id;
  out["@iot.selfLink"] = self;
  for (const auto& link : navigation_links(ref.kind))
    out[std::string(link.name) + "@iot.navigationLink"] = self + "/" + std::string(link.name);
  const json fields = to_field_map(e);  // std::map keys: already sorted
  for (const auto& [k, v] : fields.items()) {
    if (is_relation_field(k)) continue;
    out[k] = ordered_json(v);
  }
  return out;
}

inline std::string landing_page(std::string_view base) {
  ordered_json arr = ordered_json::array();
  for (auto k : kAllKinds) arr.push_back({{"name", collection_name(k)}, {"url", collection_url(base, k)}});
  return ordered_json{{"value", std::move(arr)}}.dump();
}

/// Rebuilds the query string for the page after `page`, keeping the
/// caller's other parameters.
inline std::string next_link(std::string_view base, std::string_view path, const QueryParams& p,
                             std::size_t next_offset) {
  std::string s(base);
  s += path;
  s += "?";
  if (p.top) s += "$top=" + std::to_string(*p.top) + "&";
  s += "$skip=" + std::to_string(next_offset);
  if (p.count) s += "&$count=true";
  if (p.format == ResultFormat::DataArray) s += "&resultFormat=dataArray";
  return s;
}

namespace detail {

inline void page_header(ordered_json& out, const Page& page, std::string_view base, std::string_view path,
                        const QueryParams& p) {
  if (page.total_count) out["@iot.count"] = *page.total_count;
  if (page.next_offset) out["@iot.nextLink"] = next_link(base, path, p, *page.next_offset);
}

}  // namespace detail

/// Default collection document: `{"@iot.count"?, "@iot.nextLink"?, "value": [...]}`.
inline std::string serialize_page(const Page& page, std::string_view base, std::string_view path,
                                  const QueryParams& p) {
  ordered_json out = ordered_json::object();
  detail::page_header(out, page, base, path, p);
  ordered_json value = ordered_json::array();
  for (const auto& e : page.items) value.push_back(serialize_entity(e, base));
  out["value"] = std::move(value);
  return out.dump();
}

/// Compact Observation encoding: one group per Datastream (ascending id),
/// rows of `[phenomenonTime, result]` in page order.
inline std::string serialize_data_array(const Page& page, std::string_view base, std::string_view path = {},
                                        const QueryParams& p = {}) {
  std::map<std::uint64_t, ordered_json> groups;
  for (const auto& e : page.items) {
    const auto& o = std::get<Observation>(e);
    auto [it, fresh] = groups.try_emplace(o.datastream.id);
    if (fresh) it->second = ordered_json::array();
    it->second.push_back(ordered_json::array({format_time_value(o.phenomenon_time), ordered_json(scalar_to_json(o.result))}));
  }
  ordered_json out = ordered_json::object();
  detail::page_header(out, page, base, path, p);
  ordered_json value = ordered_json::array();
  if (groups.empty()) {
    value.push_back({{"components", {"phenomenonTime", "result"}}, {"dataArray@iot.count", 0},
                     {"dataArray", ordered_json::array()}});
  }
  for (auto& [ds, rows] : groups) {
    ordered_json g = ordered_json::object();
    g["Datastream@iot.navigationLink"] = self_link(base, {EntityKind::Datastream, ds});
    g["components"] = {"phenomenonTime", "result"};
    g["dataArray@iot.count"] = rows.size();
    g["dataArray"] = std::move(rows);
    value.push_back(std::move(g));
  }
  out["value"] = std::move(value);
  return out.dump();
}

inline ordered_json serialize_cascade(const CascadeReport& r, std::string_view base) {
  ordered_json deleted = ordered_json::array();
  for (const auto& d : r.deleted) deleted.push_back(self_link(base, d));
  ordered_json unlinked = ordered_json::array();
  for (const auto& [ref, rel] : r.unlinked) unlinked.push_back({{"entity", self_link(base, ref)}, {"relation", rel}});
  ordered_json out = ordered_json::object();
  out["deleted"] = std::move(deleted);
  out["unlinked"] = std::move(unlinked);
  return out;
}

}  // namespace sensorhub
