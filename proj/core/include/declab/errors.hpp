// Copyright 2026 The declab Authors
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

namespace declab {

// Base class for all library errors; callers can catch this to separate
// our failures from std::bad_alloc and friends.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

class OverflowError : public Error {
public:
  using Error::Error;
};

class BudgetExceeded : public Error {
public:
  BudgetExceeded(const std::string &what, double estimated_bytes)
      : Error(what), estimated_bytes_(estimated_bytes) {}
  double estimated_bytes() const noexcept { return estimated_bytes_; }

private:
  double estimated_bytes_;
};

// Raised when two independent evaluations of the same quantity disagree.
class CrosscheckFailure : public Error {
public:
  using Error::Error;
};

} // namespace declab
