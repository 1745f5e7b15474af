// Copyright 2026 The lklm Authors.
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

#include "lklm/genclient.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "lklm/error.hpp"

namespace lklm {

using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::chrono::milliseconds default_timeout() {
  if (const char* env = std::getenv("LKLM_TIMEOUT_S")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return std::chrono::seconds(v);
  }
  return kDefaultTimeout;
}

Endpoint Endpoint::parse(std::string_view url) {
  constexpr std::string_view scheme = "http://";
  if (url.substr(0, scheme.size()) != scheme) {
    throw Error(ErrorCode::ConfigError, "endpoint must start with http://: " + std::string(url));
  }
  std::string_view rest = url.substr(scheme.size());
  auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  Endpoint ep;
  if (slash != std::string_view::npos) {
    ep.base_path = std::string(rest.substr(slash));
    while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
  }
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    std::string_view port = authority.substr(colon + 1);
    int p = 0;
    if (port.empty() || port.size() > 5) throw Error(ErrorCode::ConfigError, "bad port in " + std::string(url));
    for (char c : port) {
      if (c < '0' || c > '9') throw Error(ErrorCode::ConfigError, "bad port in " + std::string(url));
      p = p * 10 + (c - '0');
    }
    if (p < 1 || p > 65535) throw Error(ErrorCode::ConfigError, "port out of range in " + std::string(url));
    ep.port = p;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw Error(ErrorCode::ConfigError, "missing host in " + std::string(url));
  ep.host = std::string(authority);
  return ep;
}

std::string Endpoint::url() const { return "http://" + host + ":" + std::to_string(port) + base_path; }

// ---------------------------------------------------------------------------
// Request codec

std::string request_to_json(const GenerateRequest& r) {
  ordered_json j;
  j["prompt"] = r.prompt;
  j["strategy"] = std::string(to_string(r.strategy));
  j["beam_width"] = r.beam_width ? ordered_json(*r.beam_width) : ordered_json(nullptr);
  j["max_new_tokens"] = r.max_new_tokens;
  j["temperature"] = r.temperature ? ordered_json(*r.temperature) : ordered_json(nullptr);
  j["seed"] = r.seed ? ordered_json(*r.seed) : ordered_json(nullptr);
  return j.dump();
}

GenerateRequest request_from_json(std::string_view json) {
  auto j = ordered_json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::InvalidRequest, "body is not a JSON object");
  auto bad = [](const std::string& what) { return Error(ErrorCode::InvalidRequest, what); };
  GenerateRequest r;
  if (!j.contains("prompt") || !j["prompt"].is_string()) throw bad("prompt must be a string");
  r.prompt = j["prompt"].get<std::string>();
  if (!j.contains("strategy") || !j["strategy"].is_string()) throw bad("strategy must be a string");
  auto s = parse_strategy(j["strategy"].get<std::string>());
  if (!s) throw bad("unknown strategy");
  r.strategy = *s;
  if (!j.contains("max_new_tokens") || !j["max_new_tokens"].is_number_integer()) {
    throw bad("max_new_tokens must be an integer");
  }
  auto mnt = j["max_new_tokens"].get<long long>();
  if (mnt < 1 || mnt > 1'000'000) throw bad("max_new_tokens out of range");
  r.max_new_tokens = static_cast<int>(mnt);
  if (j.contains("beam_width") && !j["beam_width"].is_null()) {
    if (!j["beam_width"].is_number_integer()) throw bad("beam_width must be an integer");
    auto w = j["beam_width"].get<long long>();
    if (w < 1 || w > 1'000'000) throw bad("beam_width out of range");
    r.beam_width = static_cast<int>(w);
  }
  if (j.contains("temperature") && !j["temperature"].is_null()) {
    if (!j["temperature"].is_number()) throw bad("temperature must be a number");
    r.temperature = j["temperature"].get<double>();
  }
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_unsigned()) throw bad("seed must be a non-negative integer");
    r.seed = j["seed"].get<std::uint64_t>();
  }
  r.validate();
  return r;
}

// ---------------------------------------------------------------------------
// Client

namespace {

httplib::Result send(const Endpoint& ep, const std::string& method, const std::string& path, std::string body,
                     std::chrono::milliseconds timeout, Clock::time_point start) {
  httplib::Client cli(ep.host, ep.port);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  cli.set_keep_alive(false);
  httplib::Request req;
  req.method = method;
  req.path = ep.base_path + path;
  req.headers = {{"Accept", "application/json"}};
  if (method == "POST") {
    req.body = std::move(body);
    req.headers.emplace("Content-Type", "application/json");
  }
  const auto deadline = start + timeout;
  req.progress = [deadline](std::uint64_t, std::uint64_t) { return Clock::now() < deadline; };
  return cli.send(req);
}

[[noreturn]] void raise_transport(const httplib::Result& res, const Endpoint& ep, std::chrono::milliseconds timeout,
                                  Clock::time_point start) {
  const auto err = res.error();
  const std::string where = ep.url();
  if (err == httplib::Error::Connection || err == httplib::Error::ConnectionTimeout) {
    throw Error(ErrorCode::Unreachable, "cannot connect to " + where);
  }
  // A read that gives up at the deadline is a timeout; anything earlier is a
  // broken exchange.
  auto elapsed = Clock::now() - start;
  if (err == httplib::Error::Canceled || elapsed + std::chrono::milliseconds(50) >= timeout) {
    throw Error(ErrorCode::Timeout, "no response from " + where + " within " + std::to_string(timeout.count()) +
                                        " ms");
  }
  throw Error(ErrorCode::ProtocolError, "transport error talking to " + where + ": " + httplib::to_string(err));
}

ordered_json parse_ok(const httplib::Response& res, const std::string& where) {
  if (res.status == 400) {
    std::string detail = res.body;
    auto j = ordered_json::parse(res.body, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("error") && j["error"].is_string()) {
      detail = j["error"].get<std::string>();
    }
    throw Error(ErrorCode::InvalidRequest, where + " rejected the request: " + detail);
  }
  if (res.status < 200 || res.status >= 300) {
    throw Error(ErrorCode::ProtocolError, where + " answered HTTP " + std::to_string(res.status));
  }
  auto j = ordered_json::parse(res.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::MalformedResponse, where + " returned a non-object body");
  }
  return j;
}

template <typename T>
T field(const ordered_json& j, const char* name, const std::string& where) {
  if (!j.contains(name)) throw Error(ErrorCode::MalformedResponse, where + ": missing field " + name);
  const auto& v = j[name];
  bool ok = false;
  if constexpr (std::is_same_v<T, std::string>) {
    ok = v.is_string();
  } else {
    ok = v.is_number_unsigned() || (v.is_number_integer() && v.template get<long long>() >= 0);
  }
  if (!ok) throw Error(ErrorCode::MalformedResponse, where + ": bad type for " + name);
  return v.template get<T>();
}

}  // namespace

RemoteBackend::RemoteBackend(std::string_view url, std::chrono::milliseconds timeout)
    : endpoint_(Endpoint::parse(url)), timeout_(timeout) {
  if (timeout_.count() <= 0) throw Error(ErrorCode::ConfigError, "timeout must be positive");
}

BackendInfo RemoteBackend::info() const {
  const auto start = Clock::now();
  auto res = send(endpoint_, "GET", "/v1/info", {}, timeout_, start);
  if (!res) raise_transport(res, endpoint_, timeout_, start);
  const std::string where = endpoint_.url() + "/v1/info";
  auto j = parse_ok(*res, where);
  BackendInfo bi;
  bi.model_id = field<std::string>(j, "model_id", where);
  bi.size_bytes = field<std::uint64_t>(j, "size_bytes", where);
  bi.load_ms = field<std::uint64_t>(j, "load_ms", where);
  return bi;
}

GenerationResult RemoteBackend::generate(const GenerateRequest& request) const {
  request.validate();
  const auto start = Clock::now();
  auto res = send(endpoint_, "POST", "/v1/generate", request_to_json(request), timeout_, start);
  if (!res) raise_transport(res, endpoint_, timeout_, start);
  const std::string where = endpoint_.url() + "/v1/generate";
  auto j = parse_ok(*res, where);
  GenerationResult r;
  r.text = field<std::string>(j, "text", where);
  r.tokens_generated = field<std::uint64_t>(j, "tokens_generated", where);
  r.inference_ms = static_cast<double>(field<std::uint64_t>(j, "inference_ms", where));
  r.model_id = field<std::string>(j, "model_id", where);
  r.strategy = request.strategy;
  r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return r;
}

BackendInfo info(std::string_view url, std::chrono::milliseconds timeout) {
  return RemoteBackend(url, timeout).info();
}

GenerationResult generate(std::string_view url, const GenerateRequest& request, std::chrono::milliseconds timeout) {
  return RemoteBackend(url, timeout).generate(request);
}

// ---------------------------------------------------------------------------
// Server

struct ProtocolServer::Impl {
  httplib::Server server;
  std::mutex backend_mutex;  // guards `backend`
  std::shared_ptr<const Backend> backend;
  std::mutex generate_mutex;  // one generation at a time
  std::thread thread;
  std::string host;
  int port = 0;

  std::shared_ptr<const Backend> current() {
    std::lock_guard lock(backend_mutex);
    return backend;
  }
};

namespace {

void reply(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, ordered_json{{"error", message}});
}

}  // namespace

ProtocolServer::ProtocolServer(std::shared_ptr<const Backend> backend) : impl_(std::make_unique<Impl>()) {
  impl_->backend = std::move(backend);
  Impl* impl = impl_.get();

  impl->server.Get("/v1/info", [impl](const httplib::Request&, httplib::Response& res) {
    auto backend = impl->current();
    if (!backend) return reply_error(res, 503, "model not loaded");
    try {
      BackendInfo bi = backend->info();
      reply(res, 200, ordered_json{{"model_id", bi.model_id}, {"size_bytes", bi.size_bytes}, {"load_ms", bi.load_ms}});
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  });

  impl->server.Post("/v1/generate", [impl](const httplib::Request& req, httplib::Response& res) {
    auto backend = impl->current();
    if (!backend) return reply_error(res, 503, "model not loaded");
    GenerateRequest request;
    try {
      request = request_from_json(req.body);
    } catch (const Error& e) {
      return reply_error(res, 400, e.what());
    }
    try {
      std::lock_guard lock(impl->generate_mutex);
      GenerationResult r = backend->generate(request);
      reply(res, 200,
            ordered_json{{"text", r.text},
                         {"tokens_generated", r.tokens_generated},
                         {"inference_ms", static_cast<std::uint64_t>(std::llround(std::max(0.0, r.inference_ms)))},
                         {"model_id", r.model_id}});
    } catch (const Error& e) {
      bool client_fault = e.code() == ErrorCode::InvalidRequest || e.code() == ErrorCode::InvalidArgument;
      reply_error(res, client_fault ? 400 : 500, e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  });
}

ProtocolServer::~ProtocolServer() { stop(); }

void ProtocolServer::set_backend(std::shared_ptr<const Backend> backend) {
  std::lock_guard lock(impl_->backend_mutex);
  impl_->backend = std::move(backend);
}

int ProtocolServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->host = host;
  impl_->port = bound;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ProtocolServer::listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) throw Error(ErrorCode::Io, "cannot listen on " + url());
}

void ProtocolServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string ProtocolServer::url() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

// ---------------------------------------------------------------------------
// Conformance

std::vector<ConformanceCheck> run_conformance(std::string_view url, std::chrono::milliseconds timeout) {
  std::vector<ConformanceCheck> out;
  const Endpoint ep = Endpoint::parse(url);
  RemoteBackend client(url, timeout);

  auto check = [&](std::string name, auto&& body) {
    ConformanceCheck c{std::move(name), false, {}};
    try {
      c.detail = body();
      c.passed = true;
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  };
  auto expect = [](bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorCode::ProtocolError, what);
  };
  auto raw_post = [&](const std::string& body) {
    const auto start = Clock::now();
    auto res = send(ep, "POST", "/v1/generate", body, timeout, start);
    if (!res) raise_transport(res, ep, timeout, start);
    return *res;
  };

  check("info schema", [&] {
    BackendInfo bi = client.info();
    expect(!bi.model_id.empty(), "model_id is empty");
    expect(bi.size_bytes > 0, "size_bytes must be > 0 for a loaded model");
    return bi.model_id + " " + std::to_string(bi.size_bytes) + " bytes";
  });

  GenerateRequest greedy;
  greedy.prompt = "Cut the fabric";
  greedy.strategy = Strategy::Greedy;
  greedy.max_new_tokens = 8;

  check("generate schema", [&] {
    GenerationResult r = client.generate(greedy);
    expect(r.tokens_generated <= static_cast<std::size_t>(greedy.max_new_tokens), "tokens_generated over budget");
    return std::to_string(r.tokens_generated) + " tokens";
  });
  check("content type", [&] {
    auto res = raw_post(request_to_json(greedy));
    auto ct = res.get_header_value("Content-Type");
    expect(ct.rfind("application/json", 0) == 0, "Content-Type is '" + ct + "'");
    return ct;
  });
  check("400 on malformed JSON", [&] {
    auto res = raw_post("{not json");
    expect(res.status == 400, "got HTTP " + std::to_string(res.status));
    return std::string("400");
  });
  check("400 on beam without width", [&] {
    auto res = raw_post(R"({"prompt":"x","strategy":"beam","beam_width":null,"max_new_tokens":4,)"
                        R"("temperature":null,"seed":null})");
    expect(res.status == 400, "got HTTP " + std::to_string(res.status));
    return std::string("400");
  });
  check("400 on unknown strategy", [&] {
    auto res = raw_post(R"({"prompt":"x","strategy":"nucleus","beam_width":null,"max_new_tokens":4,)"
                        R"("temperature":null,"seed":null})");
    expect(res.status == 400, "got HTTP " + std::to_string(res.status));
    return std::string("400");
  });
  check("503 or 200 only for info", [&] {
    const auto start = Clock::now();
    auto res = send(ep, "GET", "/v1/info", {}, timeout, start);
    if (!res) raise_transport(res, ep, timeout, start);
    expect(res->status == 200 || res->status == 503, "got HTTP " + std::to_string(res->status));
    return std::to_string(res->status);
  });
  check("greedy determinism", [&] {
    auto a = client.generate(greedy);
    auto b = client.generate(greedy);
    expect(a.text == b.text, "two greedy runs differ");
    return std::string("identical");
  });
  check("seeded sample determinism", [&] {
    GenerateRequest s = greedy;
    s.strategy = Strategy::Sample;
    s.seed = 1234;
    s.temperature = 1.0;
    auto a = client.generate(s);
    auto b = client.generate(s);
    expect(a.text == b.text, "two seeded samples differ");
    return std::string("identical");
  });
  check("beam accepted", [&] {
    GenerateRequest b = greedy;
    b.strategy = Strategy::Beam;
    b.beam_width = 2;
    client.generate(b);
    return std::string("ok");
  });
  return out;
}

}  // namespace lklm
