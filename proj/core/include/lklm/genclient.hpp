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

#pragma once

// HTTP/JSON client and reference server for the generation protocol:
//   GET  /v1/info      -> {"model_id", "size_bytes", "load_ms"}
//   POST /v1/generate  -> {"text", "tokens_generated", "inference_ms", "model_id"}
// 400 on an invalid request, 503 while no model is loaded, 500 otherwise.

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lklm/generation.hpp"

namespace lklm {

inline constexpr std::chrono::seconds kDefaultTimeout{600};

// LKLM_TIMEOUT_S when set to a positive integer, else 600 s.
std::chrono::milliseconds default_timeout();

struct Endpoint {
  std::string host;
  int port = 80;
  std::string base_path;  // no trailing slash

  // Accepts http://host[:port][/path]. Anything else is a ConfigError.
  static Endpoint parse(std::string_view url);
  std::string url() const;
};

std::string request_to_json(const GenerateRequest& request);
// Throws InvalidRequest on schema errors or contradictory fields.
GenerateRequest request_from_json(std::string_view json);

// Thread-safe: every call opens its own connection. No automatic retries.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(std::string_view url, std::chrono::milliseconds timeout = default_timeout());

  BackendInfo info() const override;
  GenerationResult generate(const GenerateRequest& request) const override;

  const Endpoint& endpoint() const noexcept { return endpoint_; }
  std::chrono::milliseconds timeout() const noexcept { return timeout_; }

 private:
  Endpoint endpoint_;
  std::chrono::milliseconds timeout_;
};

BackendInfo info(std::string_view url, std::chrono::milliseconds timeout = default_timeout());
GenerationResult generate(std::string_view url, const GenerateRequest& request,
                          std::chrono::milliseconds timeout = default_timeout());

// Serves any Backend over the protocol. Requests are handled one at a time
// so reported timings are not distorted by contention.
class ProtocolServer {
 public:
  // A null backend answers 503 until set_backend is called.
  explicit ProtocolServer(std::shared_ptr<const Backend> backend);
  ~ProtocolServer();
  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  void set_backend(std::shared_ptr<const Backend> backend);

  // Binds (port 0 picks a free one) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks serving on the calling thread.
  void listen(const std::string& host, int port);
  void stop();
  std::string url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Protocol conformance suite for a server under test: info and generate
// schemas, 400 on invalid bodies, greedy and seeded-sample determinism.
std::vector<ConformanceCheck> run_conformance(std::string_view url,
                                              std::chrono::milliseconds timeout = default_timeout());

}  // namespace lklm
