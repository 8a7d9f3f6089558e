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

/// Transport-independent request handling for the sensing API, the
/// observation-service facade (/sos) and CoP ingestion (/cop).
///
/// Routes:
///
///   GET    /  and  /v1.0                     landing page
///   GET    /v1.0/{Collection}                page of entities
///   POST   /v1.0/{Collection}                create (201 + Location)
///   GET    /v1.0/{Collection}({id})          one entity
///   PATCH  /v1.0/{Collection}({id})          JSON merge patch
///   DELETE /v1.0/{Collection}({id})          delete, returns cascade report
///   GET    /v1.0/{Collection}({id})/{Rel}    navigation
///   POST   /sos                              XML operations
///   POST   /cop                              CoP message ingestion

#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sensorhub/cop.hpp"
#include "sensorhub/serialize.hpp"
#include "sensorhub/sos.hpp"
#include "sensorhub/store.hpp"

namespace sensorhub {

struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  /// Absolute URL clients use to reach the server, without trailing slash.
  std::string base_url = "http://127.0.0.1:8080";
  bool strict = false;
  std::size_t max_top = 1000;
  std::optional<std::string> data_dir;
  std::size_t threads = 64;
};

/// Drops trailing slashes; the URL scheme requires none.
inline std::string normalize_base_url(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

struct Request {
  std::string method;
  std::string path;
  /// Raw query string without the leading '?', still percent-encoded.
  std::string query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  const std::string* header(std::string_view name) const {
    for (const auto& [k, v] : headers)
      if (k == name) return &v;
    return nullptr;
  }
};

inline std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '+') {
      out += ' ';
    } else if (c == '%' && i + 2 < s.size()) {
      unsigned v = 0;
      auto [p, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
      if (ec != std::errc() || p != s.data() + i + 3) {
        out += c;
        continue;
      }
      out += static_cast<char>(v);
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

/// Parses $top, $skip, $count and resultFormat. Other `$` options are
/// refused; plain parameters are ignored.
inline QueryParams parse_query(std::string_view raw) {
  QueryParams p;
  std::vector<std::string> seen;
  const auto number = [](const std::string& key, const std::string& v) {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
      throw Error(Errc::BadParams, key + " must be a non-negative integer", key);
    return n;
  };
  while (!raw.empty()) {
    const auto amp = raw.find('&');
    const auto part = raw.substr(0, amp);
    raw = amp == std::string_view::npos ? std::string_view() : raw.substr(amp + 1);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    const auto key = percent_decode(part.substr(0, eq));
    const auto value = eq == std::string_view::npos ? std::string() : percent_decode(part.substr(eq + 1));
    const bool ours = key == "$top" || key == "$skip" || key == "$count" || key == "resultFormat";
    if (!ours) {
      if (!key.empty() && key[0] == '$') throw Error(Errc::BadParams, "query option " + key + " is not supported", key);
      continue;
    }
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw Error(Errc::BadParams, "query option " + key + " given twice", key);
    seen.push_back(key);
    if (key == "$top") p.top = number(key, value);
    else if (key == "$skip") p.skip = number(key, value);
    else if (key == "$count") {
      if (value != "true" && value != "false") throw Error(Errc::BadParams, "$count must be true or false", key);
      p.count = value == "true";
    } else {
      if (value == "dataArray") p.format = ResultFormat::DataArray;
      else if (value != "default") throw Error(Errc::BadParams, "unknown resultFormat '" + value + "'", key);
    }
  }
  return p;
}

inline int http_status(Errc code) {
  switch (code) {
    case Errc::NotFound:
    case Errc::UnknownRelation:
    case Errc::UnknownRoute: return 404;
    case Errc::MethodNotAllowed: return 405;
    case Errc::InUse:
    case Errc::ConflictingSystemEntity:
    case Errc::DuplicateProcedure: return 409;
    case Errc::MissingField:
    case Errc::BadFieldType:
    case Errc::OutOfRange:
    case Errc::EmptyRequired:
    case Errc::UnknownField:
    case Errc::BadInterval:
    case Errc::ImmutableField:
    case Errc::ValidationErrors:
    case Errc::DanglingRef:
    case Errc::EmptyLocations: return 422;
    case Errc::StoreFull: return 507;
    case Errc::IoError:
    case Errc::CorruptStore: return 500;
    default: return 400;
  }
}

inline std::string error_body(const Error& e) {
  ordered_json v = ordered_json::array();
  for (const auto& x : e.violations())
    v.push_back({{"code", to_string(x.code)}, {"field", x.field}, {"message", x.message}});
  return ordered_json{{"code", to_string(e.code())}, {"message", e.what()}, {"violations", std::move(v)}}.dump();
}

class Service {
 public:
  Service(Store& store, ServiceConfig config, cop::SymptomTable symptoms = cop::SymptomTable::defaults())
      : store_(store),
        config_(std::move(config)),
        base_(normalize_base_url(config_.base_url)),
        symptoms_(std::move(symptoms)),
        sos_(store, base_) {}

  const std::string& base_url() const { return base_; }
  const ServiceConfig& config() const { return config_; }

  Response handle(const Request& req) {
    try {
      return route(req);
    } catch (const Error& e) {
      Response r{http_status(e.code()), "application/json", error_body(e), {}};
      if (e.code() == Errc::MethodNotAllowed) r.headers.emplace_back("Allow", e.subject());
      return r;
    } catch (const std::exception& e) {
      return {500, "application/json", error_body(Error(Errc::IoError, e.what())), {}};
    }
  }

 private:
  struct Target {
    EntityKind kind;
    std::optional<std::uint64_t> id;
    std::optional<std::string> relation;
  };

  static void allow(const Request& req, std::string_view methods) {
    // `methods` is a comma separated list such as "GET, POST".
    std::size_t pos = 0;
    while (pos < methods.size()) {
      auto comma = methods.find(',', pos);
      auto m = methods.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      while (!m.empty() && m.front() == ' ') m.remove_prefix(1);
      if (m == req.method || (req.method == "HEAD" && m == "GET")) return;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    throw Error(Errc::MethodNotAllowed, req.method + " is not allowed on " + req.path, std::string(methods));
  }

  static std::optional<Target> parse_target(std::string_view path) {
    constexpr std::string_view prefix = "/v1.0/";
    if (!path.starts_with(prefix)) return std::nullopt;
    path.remove_prefix(prefix.size());
    if (path.ends_with('/')) path.remove_suffix(1);
    std::string_view head = path, rel;
    if (auto slash = path.find('/'); slash != std::string_view::npos) {
      head = path.substr(0, slash);
      rel = path.substr(slash + 1);
      if (rel.empty() || rel.find('/') != std::string_view::npos) return std::nullopt;
    }
    std::string_view coll = head;
    std::optional<std::uint64_t> id;
    if (auto open = head.find('('); open != std::string_view::npos) {
      if (!head.ends_with(')')) return std::nullopt;
      coll = head.substr(0, open);
      const auto digits = head.substr(open + 1, head.size() - open - 2);
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size() || v == 0) return std::nullopt;
      id = v;
    }
    const auto kind = kind_from_collection(coll);
    if (!kind) return std::nullopt;
    if (!rel.empty() && !id) return std::nullopt;
    Target t{*kind, id, std::nullopt};
    if (!rel.empty()) t.relation = std::string(rel);
    return t;
  }

  static json parse_body(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::MalformedJson, "request body is not valid JSON");
    return j;
  }

  Response json_response(int status, std::string body) const { return {status, "application/json", std::move(body), {}}; }

  Response route(const Request& req) {
    const std::string_view path = req.path;
    if (path.empty() || path == "/" || path == "/v1.0" || path == "/v1.0/") {
      allow(req, "GET");
      return json_response(200, landing_page(base_));
    }
    if (path == "/sos") {
      allow(req, "POST");
      auto r = sos_.handle(req.body);
      return {r.status, "application/xml", std::move(r.body), {}};
    }
    if (path == "/cop") {
      allow(req, "POST");
      return ingest_cop(req.body);
    }
    const auto target = parse_target(path);
    if (!target) throw Error(Errc::UnknownRoute, "no resource at " + req.path, req.path);

    if (target->relation) {
      allow(req, "GET");
      const auto params = checked_query(req.query);
      const auto result = store_.navigate({target->kind, *target->id}, *target->relation, params);
      if (const auto* e = std::get_if<Entity>(&result)) return json_response(200, serialize_entity(*e, base_).dump());
      return json_response(200, render_page(std::get<Page>(result), req.path, params));
    }

    if (!target->id) {
      allow(req, "GET, POST");
      if (req.method == "POST") return create(target->kind, req.body);
      const auto params = checked_query(req.query);
      return json_response(200, render_page(store_.query(target->kind, params), req.path, params));
    }

    const EntityRef ref{target->kind, *target->id};
    allow(req, "GET, PATCH, DELETE");
    if (req.method == "PATCH") return json_response(200, serialize_entity(store_.update(ref, parse_body(req.body)), base_).dump());
    if (req.method == "DELETE") return json_response(200, serialize_cascade(store_.remove(ref), base_).dump());
    return json_response(200, serialize_entity(store_.get(ref), base_).dump());
  }

  QueryParams checked_query(std::string_view raw) const {
    auto params = parse_query(raw);
    if (params.top && *params.top > config_.max_top)
      throw Error(Errc::BadParams, "$top may not exceed " + std::to_string(config_.max_top), "$top");
    return params;
  }

  std::string render_page(const Page& page, const std::string& path, const QueryParams& params) const {
    if (params.format == ResultFormat::DataArray) return serialize_data_array(page, base_, path, params);
    return serialize_page(page, base_, path, params);
  }

  Response create(EntityKind kind, const std::string& body) {
    if (kind == EntityKind::HistoricalLocation)
      throw Error(Errc::ConflictingSystemEntity, "HistoricalLocations are recorded by the server", "HistoricalLocations");
    const json j = parse_body(body);
    auto v = validate_entity(kind, j, config_.strict ? FieldPolicy::Strict : FieldPolicy::Lenient);
    if (!v.ok()) throw Error(Errc::ValidationErrors, "entity failed validation", std::move(v.violations));
    const auto ref = store_.create(std::move(*v.entity));
    Response r = json_response(201, serialize_entity(store_.get(ref), base_).dump());
    r.headers.emplace_back("Location", self_link(base_, ref));
    return r;
  }

  Response ingest_cop(const std::string& body) {
    const auto msg = cop::decode(body, symptoms_, config_.strict ? FieldPolicy::Strict : FieldPolicy::Lenient);
    const auto created = cop::map_to_sta(msg, store_, symptoms_);
    ordered_json links = ordered_json::array();
    for (const auto& r : created) links.push_back(self_link(base_, r));
    ordered_json out{{"umi", msg.umi}, {"duplicate", created.empty()}, {"created", std::move(links)}};
    return json_response(created.empty() ? 200 : 201, out.dump());
  }

  Store& store_;
  ServiceConfig config_;
  std::string base_;
  cop::SymptomTable symptoms_;
  sos::Facade sos_;
};

}  // namespace sensorhub
