// Copyright 2026 The emostim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emostim {

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds timeout{60000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
  /// Header names lowercased.
  std::map<std::string, std::string> headers;
};

/// Connection-level failure (DNS, refused, timeout). HTTP error statuses are
/// ordinary responses.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seam between the client and the network; tests inject fakes to count
/// calls or script failures.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse Post(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport supporting http:// and https:// URLs.
std::shared_ptr<HttpTransport> MakeHttpTransport();

}  // namespace emostim
