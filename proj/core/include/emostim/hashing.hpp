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

#include <string>
#include <string_view>

#include "emostim/json_io.hpp"

namespace emostim {

/// Lowercase hex SHA-256 of the bytes.
std::string Sha256Hex(std::string_view bytes);

/// Sorted keys, UTF-8, no insignificant whitespace. Throws ValidationError on
/// strings that are not valid UTF-8.
std::string CanonicalJson(const Json& value);

}  // namespace emostim
