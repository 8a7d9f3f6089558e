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

// sensorhub: serves the sensing API, the SOS facade and the CoP ingest
// endpoint; `sensorhub cop ...` works with CoP message files.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sensorhub/cop.hpp"
#include "sensorhub/server.hpp"
#include "sensorhub/service.hpp"

namespace {

using namespace sensorhub;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report(const Error& e) {
  std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
  for (const auto& v : e.violations()) std::cerr << "  " << v.field << ": " << v.message << "\n";
}

/// Splits "host:port"; a bare host keeps `port`.
void split_bind(const std::string& bind, ServiceConfig& c) {
  const auto colon = bind.rfind(':');
  const auto bracket = bind.find(']');
  if (colon == std::string::npos || (bracket != std::string::npos && bracket > colon)) {
    c.bind = bind;
    return;
  }
  c.bind = bind.substr(0, colon);
  c.port = std::stoi(bind.substr(colon + 1));
}

int serve(const std::string& bind, ServiceConfig config, const std::string& symptoms_file) {
  split_bind(bind, config);
  if (config.base_url.empty()) config.base_url = "http://" + config.bind + ":" + std::to_string(config.port);
  auto symptoms = symptoms_file.empty() ? cop::SymptomTable::defaults() : cop::SymptomTable::load(symptoms_file);

  StoreOptions opts;
  if (config.data_dir) opts.data_dir = *config.data_dir;
  opts.field_policy = config.strict ? FieldPolicy::Strict : FieldPolicy::Lenient;
  opts.max_top = config.max_top;
  Store store(opts);
  Service service(store, config, std::move(symptoms));

  // Handle SIGINT/SIGTERM synchronously on this thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(service, config.threads);
  const int port = server.bind(config.bind, config.port);
  server.start();
  std::cerr << "sensorhub listening on " << config.bind << ":" << port << " (base " << service.base_url()
            << ", pid " << ::getpid() << ")\n";
  int sig = 0;
  sigwait(&signals, &sig);
  std::cerr << "shutting down\n";
  server.stop();
  return 0;
}

int cop_validate(const std::string& file, bool strict, const std::string& symptoms_file) {
  const auto table = symptoms_file.empty() ? cop::SymptomTable::defaults() : cop::SymptomTable::load(symptoms_file);
  const auto msg = cop::decode(read_file(file), table, strict ? FieldPolicy::Strict : FieldPolicy::Lenient);
  std::cout << cop::encode(msg, table) << "\n";
  return 0;
}

int cop_send(const std::string& file, const std::string& url) {
  const auto body = read_file(file);
  const auto u = Url::parse(url);
  httplib::Client client(u.origin);
  client.set_connection_timeout(5);
  auto res = client.Post(u.path + "/cop", body, "application/xml");
  if (!res) throw Error(Errc::TargetUnreachable, "no response from " + url, url);
  std::cout << res->body << "\n";
  if (res->status < 200 || res->status >= 300) {
    std::cerr << "error: server answered " << res->status << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SensorHub sensing server"};
  app.set_version_flag("--version", "sensorhub 1.0.0");

  ServiceConfig config;
  config.base_url.clear();
  std::string bind = "127.0.0.1:8080";
  std::string data_dir;
  std::string symptoms_file;
  app.add_option("--bind", bind, "listen address, host[:port]")->envname("SENSORHUB_BIND")->capture_default_str();
  app.add_option("--base-url", config.base_url, "absolute URL used in links (default http://<bind>)")
      ->envname("SENSORHUB_BASE_URL");
  app.add_option("--data-dir", data_dir, "durable storage directory (default: in memory)")
      ->envname("SENSORHUB_DATA_DIR");
  app.add_option("--max-top", config.max_top, "largest accepted $top")
      ->envname("SENSORHUB_MAX_TOP")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--strict", config.strict, "reject unknown fields")->envname("SENSORHUB_STRICT");
  app.add_option("--threads", config.threads, "worker threads")
      ->envname("SENSORHUB_THREADS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--symptoms", symptoms_file, "symptom table file (CODE = name per line)")
      ->envname("SENSORHUB_SYMPTOMS")
      ->check(CLI::ExistingFile);

  auto* cop = app.add_subcommand("cop", "work with CoP message files");
  cop->require_subcommand(1);
  std::string file, url;
  bool strict_cop = false;
  auto* validate = cop->add_subcommand("validate", "decode a message and print its canonical form");
  validate->add_option("file", file, "message file")->required()->check(CLI::ExistingFile);
  validate->add_flag("--strict", strict_cop, "reject unknown attributes");
  auto* send = cop->add_subcommand("send", "POST a message to a running server");
  send->add_option("file", file, "message file")->required()->check(CLI::ExistingFile);
  send->add_option("--url", url, "server base URL")->required()->envname("SENSORHUB_URL");

  CLI11_PARSE(app, argc, argv);
  if (!data_dir.empty()) config.data_dir = data_dir;

  try {
    if (validate->parsed()) return cop_validate(file, strict_cop || config.strict, symptoms_file);
    if (send->parsed()) return cop_send(file, url);
    return serve(bind, config, symptoms_file);
  } catch (const Error& e) {
    report(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
