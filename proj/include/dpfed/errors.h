/*
 * Copyright 2026 The dpfed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DPFED_ERRORS_H_
#define DPFED_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpfed {

// Bad caller input: dimension mismatch, out-of-range parameter, malformed
// file contents.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The request is well formed but not supported for this input, e.g. a
// closed-form optimum for a logistic federation.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A numerical routine failed in a way that indicates a bug or an
// ill-conditioned problem (singular system, non-converged solve).
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration file problems. Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dpfed

#endif  // DPFED_ERRORS_H_
