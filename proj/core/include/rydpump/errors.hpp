// Copyright 2026 The rydpump Authors
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

#include <stdexcept>
#include <string>

namespace rydpump {

// Caller supplied something outside an operation's domain.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed (no convergence, breakdown, degenerate data).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive time stepping exhausted its halving budget.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double last_dt, double last_change)
      : NumericalError(what), last_dt_(last_dt), last_change_(last_change) {}

  double last_dt() const noexcept { return last_dt_; }
  double last_change() const noexcept { return last_change_; }

 private:
  double last_dt_;
  double last_change_;
};

// The pump trajectory has zero radius everywhere (gap closed on the whole loop).
class GapClosureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rydpump
