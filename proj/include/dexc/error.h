// Copyright 2026 The dexc Authors
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

#ifndef DEXC_ERROR_H_
#define DEXC_ERROR_H_

#include <stdexcept>
#include <string>

namespace dexc {

// Base class for every error raised by the library. The CLI prints what()
// behind a fixed "error:" prefix.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates a precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file or document does not match its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// The simulator produced a non-finite value.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace dexc

#endif  // DEXC_ERROR_H_
