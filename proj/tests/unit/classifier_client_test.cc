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

#include "doctest.h"
#include "storystyle/error.h"
#include "stub_classifier.h"

namespace ss = storystyle;
using ss::testing::StubClassifier;

namespace {

ss::ClassifierEndpoint endpoint_for(const StubClassifier& stub, int timeout_ms = 500) {
  auto ep = ss::ClassifierEndpoint::parse(stub.address());
  ep.timeout_ms = timeout_ms;
  ep.backoff_ms = 5;
  return ep;
}

void reply(httplib::Response& res, const std::string& json) {
  res.set_content(json, "application/json");
}

}  // namespace

TEST_CASE("endpoint addresses") {
  auto ep = ss::ClassifierEndpoint::parse("http://localhost:8080/api/emotion");
  CHECK(ep.host == "localhost");
  CHECK(ep.port == 8080);
  CHECK(ep.path == "/api/emotion");
  CHECK(ep.address() == "http://localhost:8080/api/emotion");
  ep = ss::ClassifierEndpoint::parse("10.0.0.2:9000");
  CHECK(ep.path == "/classify");
  CHECK_THROWS_AS(ss::ClassifierEndpoint::parse("host:notaport"), ss::ValidationError);
  CHECK_THROWS_AS(ss::ClassifierEndpoint::parse("https://host/x"), ss::ValidationError);
}

TEST_CASE("response parsing") {
  const auto c = ss::parse_classifier_response(R"({"label": "anger", "score": 0.75})");
  CHECK(c.label == ss::Emotion::kAnger);
  CHECK(c.score == 0.75);
  CHECK_THROWS_AS(ss::parse_classifier_response("not json"), ss::ValidationError);
  CHECK_THROWS_AS(ss::parse_classifier_response(R"({"label": "joy"})"), ss::ValidationError);
  CHECK_THROWS_AS(ss::parse_classifier_response(R"({"label": "joy", "score": 2})"),
                  ss::ValidationError);
}

TEST_CASE("stub returning a fixed answer") {
  std::string seen;
  StubClassifier stub([&](const std::string& body, int, httplib::Response& res) {
    seen = body;
    reply(res, R"({"label": "joy", "score": 0.9})");
  });
  const auto c = ss::classify_remote("What a day!", endpoint_for(stub));
  CHECK(c.label == ss::Emotion::kJoy);
  CHECK(c.score == 0.9);
  CHECK(seen == "What a day!");
}

TEST_CASE("stub returning an unknown label") {
  StubClassifier stub([](const std::string&, int, httplib::Response& res) {
    reply(res, R"({"label": "bliss", "score": 0.9})");
  });
  CHECK_THROWS_AS(ss::classify_remote("x", endpoint_for(stub)), ss::ValidationError);
  CHECK(stub.requests() == 1);
}

TEST_CASE("two timeouts then success") {
  StubClassifier stub([](const std::string&, int request, httplib::Response& res) {
    if (request <= 2) std::this_thread::sleep_for(std::chrono::milliseconds(600));
    reply(res, R"({"label": "fear", "score": 0.8})");
  });
  const auto c = ss::classify_remote("x", endpoint_for(stub, 200));
  CHECK(c.label == ss::Emotion::kFear);
  CHECK(stub.requests() == 3);
}

TEST_CASE("server errors are retried, then reported") {
  StubClassifier stub([](const std::string&, int, httplib::Response& res) { res.status = 503; });
  CHECK_THROWS_AS(ss::classify_remote("x", endpoint_for(stub)), ss::TransportError);
  CHECK(stub.requests() == 3);
}

TEST_CASE("client errors are not retried") {
  StubClassifier stub([](const std::string&, int, httplib::Response& res) { res.status = 404; });
  CHECK_THROWS_AS(ss::classify_remote("x", endpoint_for(stub)), ss::TransportError);
  CHECK(stub.requests() == 1);
}

TEST_CASE("unreachable endpoint") {
  int port = 0;
  {
    StubClassifier stub([](const std::string&, int, httplib::Response&) {});
    port = stub.port();
  }
  ss::ClassifierEndpoint ep;
  ep.port = port;
  ep.timeout_ms = 200;
  ep.backoff_ms = 1;
  CHECK_THROWS_WITH_AS(ss::classify_remote("x", ep), doctest::Contains("3 attempts"),
                       ss::TransportError);
}
