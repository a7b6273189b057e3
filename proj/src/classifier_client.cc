// Copyright 2026 The storystyle Authors.
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

#include "storystyle/classifier_client.h"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {

ClassifierEndpoint ClassifierEndpoint::parse(std::string_view address) {
  ClassifierEndpoint ep;
  std::string_view rest = trim(address);
  if (rest.starts_with("http://")) rest.remove_prefix(7);
  if (rest.starts_with("https://")) {
    throw ValidationError("https classifier endpoints are not supported");
  }
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  if (slash != std::string_view::npos) ep.path = std::string(rest.substr(slash));
  const auto colon = authority.rfind(':');
  if (colon == std::string_view::npos) {
    ep.host = std::string(authority);
  } else {
    ep.host = std::string(authority.substr(0, colon));
    auto port = parse_int(authority.substr(colon + 1));
    if (!port || *port <= 0 || *port > 65535) {
      throw ValidationError("invalid port in classifier address '" +
                            std::string(address) + "'");
    }
    ep.port = static_cast<int>(*port);
  }
  if (ep.host.empty()) {
    throw ValidationError("missing host in classifier address '" +
                          std::string(address) + "'");
  }
  return ep;
}

std::string ClassifierEndpoint::address() const {
  return "http://" + host + ":" + std::to_string(port) + path;
}

Classification parse_classifier_response(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("classifier response is not JSON: ") +
                          e.what());
  }
  if (!doc.is_object() || !doc.contains("label") || !doc.contains("score") ||
      !doc["label"].is_string() || !doc["score"].is_number()) {
    throw ValidationError(
        "classifier response must be {\"label\": string, \"score\": number}");
  }
  const auto name = doc["label"].get<std::string>();
  auto label = parse_emotion(name);
  if (!label) {
    throw ValidationError("classifier returned unknown label '" + name + "'");
  }
  const double score = doc["score"].get<double>();
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ValidationError("classifier score " + format_double(score) +
                          " outside [0, 1]");
  }
  return {*label, score};
}

Classification classify_remote(std::string_view text,
                               const ClassifierEndpoint& endpoint) {
  const int attempts = std::max(1, endpoint.max_attempts);
  const auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(endpoint.backoff_ms) * (1 << (attempt - 2)));
    }
    httplib::Client client(endpoint.host, endpoint.port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(endpoint.path, std::string(text),
                           "text/plain; charset=utf-8");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("classifier at " + endpoint.address() +
                           " answered HTTP " + std::to_string(res->status));
    }
    return parse_classifier_response(res->body);
  }
  throw TransportError("classifier at " + endpoint.address() +
                       " failed after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

}  // namespace storystyle
