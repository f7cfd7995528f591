// Copyright 2026 The kpnn-forest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KPNN_ERROR_HPP_
#define KPNN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace kpnn {

// Contract violation on inputs: dimension mismatch, bad parameters,
// unknown catalog ids. The CLI maps this to exit status 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure that must be reported rather than papered over:
// non-convergent quadrature, unrepairable covariance. Exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem trouble in the CLI. Exit status 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kpnn

#endif  // KPNN_ERROR_HPP_
