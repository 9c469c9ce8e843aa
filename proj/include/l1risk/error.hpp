// Copyright 2026 The l1risk Authors
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

namespace l1risk {

// Argument outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce an answer (no sign change, iteration
// cap, singular system, non-finite iterate).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
  SolverError(const std::string& what, double bracket_lo, double bracket_hi)
      : std::runtime_error(what + " [bracket " + std::to_string(bracket_lo) +
                           ", " + std::to_string(bracket_hi) + "]"),
        lo_(bracket_lo),
        hi_(bracket_hi) {}

  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw DomainError(msg);
}

}  // namespace l1risk
