// Copyright 2026 The metriclens Authors
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

#include <sstream>
#include <stdexcept>
#include <string>

namespace metriclens {

/// Base class for all toolkit failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration or command usage. The CLI maps this to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data or a numerical failure while running. Exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <typename... Parts>
std::string concat(Parts&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

}  // namespace detail

template <typename... Parts>
[[noreturn]] void fail_data(Parts&&... parts) {
  throw DataError(detail::concat(std::forward<Parts>(parts)...));
}

template <typename... Parts>
[[noreturn]] void fail_config(Parts&&... parts) {
  throw ValidationError(detail::concat(std::forward<Parts>(parts)...));
}

}  // namespace metriclens
