// Copyright 2026 The coalflow Authors
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

#include <stdexcept>
#include <string>

namespace coalflow {

// Malformed input: unparseable files, unknown ids, missing model entries.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A hard size guard was hit (exhaustive oracles refuse to truncate).
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition of an online step was violated.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace coalflow
