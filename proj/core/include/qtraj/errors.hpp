// Copyright 2026 The qtraj Authors
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

namespace qtraj {

// Base of every exception thrown by the library. code() is a short stable tag
// used by the command line front-end when it prints machine-readable errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* code() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "invalid-argument"; }
};

// Blow-up, positivity loss, grid overflow or a solver that did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "numerical"; }
};

// A quantum jump was requested from a state with zero jump probability.
class DegenerateJump : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* code() const noexcept override { return "degenerate-jump"; }
};

// Measurement records that contradict the detector model.
class RecordError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "record"; }
};

}  // namespace qtraj
