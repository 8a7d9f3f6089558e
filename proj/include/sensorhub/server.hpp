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

/// HTTP/1.1 binding of Service on cpp-httplib, plus a small client used by
/// the CLI tools.

#pragma once

#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 512
#endif
#ifndef CPPHTTPLIB_TCP_NODELAY
#define CPPHTTPLIB_TCP_NODELAY true
#endif
#include <httplib.h>

#include <atomic>
#include <string>
#include <string_view>
#include <thread>

#include "sensorhub/service.hpp"

namespace sensorhub {

class HttpServer {
 public:
  HttpServer(Service& service, std::size_t threads = 64) : service_(service) {
    server_.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    server_.set_keep_alive_max_count(1000);
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) { dispatch(req, res); };
    server_.Get(".*", handler);
    server_.Post(".*", handler);
    server_.Put(".*", handler);
    server_.Patch(".*", handler);
    server_.Delete(".*", handler);
    server_.Options(".*", handler);
  }

  ~HttpServer() { stop(); }

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port) {
    if (port == 0) port_ = server_.bind_to_any_port(host);
    else port_ = server_.bind_to_port(host, port) ? port : -1;
    if (port_ < 0) throw Error(Errc::IoError, "cannot bind " + host + ":" + std::to_string(port));
    return port_;
  }

  /// Serves on the calling thread until stop().
  void listen() { server_.listen_after_bind(); }

  /// Serves on a background thread.
  void start() {
    thread_ = std::thread([this] { listen(); });
    server_.wait_until_ready();
  }

  void stop() {
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  void dispatch(const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    if (auto q = req.target.find('?'); q != std::string::npos) r.query = req.target.substr(q + 1);
    r.body = req.body;
    auto out = service_.handle(r);
    res.status = out.status;
    for (auto& [k, v] : out.headers) res.set_header(k, v);
    res.set_content(std::move(out.body), out.content_type);
  }

  Service& service_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

/// scheme://host[:port][/path] split for httplib::Client.
struct Url {
  std::string origin;  // scheme://host:port
  std::string path;    // begins with '/', may be empty

  static Url parse(std::string_view url) {
    const auto scheme = url.find("://");
    if (scheme == std::string_view::npos || url.substr(0, scheme) != "http")
      throw Error(Errc::BadConfig, "expected an http:// URL, got '" + std::string(url) + "'");
    const auto slash = url.find('/', scheme + 3);
    Url u;
    u.origin = std::string(url.substr(0, slash));
    if (slash != std::string_view::npos) u.path = std::string(url.substr(slash));
    if (u.origin.size() == scheme + 3) throw Error(Errc::BadConfig, "URL has no host: " + std::string(url));
    return u;
  }
};

}  // namespace sensorhub
