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

#ifndef STORYSTYLE_CLASSIFIER_CLIENT_H_
#define STORYSTYLE_CLASSIFIER_CLIENT_H_

#include <string>
#include <string_view>

#include "storystyle/emotion.h"

namespace storystyle {

// Address and transport settings for an external sentence emotion
// classifier.
//
// Wire contract: the client POSTs the sentence as the UTF-8 request body
// (Content-Type: text/plain) to `path`; the service answers 200 with a JSON
// object {"label": "<category>", "score": <0..1>}.
struct ClassifierEndpoint {
  std::string host = "127.0.0.1";
  int port = 80;
  std::string path = "/classify";
  int timeout_ms = 2000;
  int max_attempts = 3;
  // Delay before retry k (1-based) is backoff_ms * 2^(k-1).
  int backoff_ms = 50;

  // Accepts "http://host:port/path", "host:port/path" or "host:port".
  static ClassifierEndpoint parse(std::string_view address);
  std::string address() const;
};

struct Classification {
  Emotion label = Emotion::kNeutral;
  double score = 0.0;
};

// Parses a service response body. Throws ValidationError when the body is
// not the documented JSON object, the label is outside the 7 categories, or
// the score lies outside [0, 1].
Classification parse_classifier_response(std::string_view body);

// Queries the service. Connection failures, timeouts and 5xx responses are
// retried up to max_attempts with exponential backoff, then TransportError.
// A malformed reply raises ValidationError without retrying. Each call owns
// its connection, so concurrent calls are independent.
Classification classify_remote(std::string_view text,
                               const ClassifierEndpoint& endpoint);

}  // namespace storystyle

#endif  // STORYSTYLE_CLASSIFIER_CLIENT_H_
