// Copyright 2026 The nhnqs Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace nhnqs {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Spin configuration or model parameters violate their invariants.
class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

// |Psi(x)| fell below the underflow floor or an amplitude ratio overflowed.
class DivergentRatioError : public Error {
 public:
  using Error::Error;
};

// Symmetrized amplitude cancelled exactly; the configuration is unreachable.
class ZeroAmplitudeError : public Error {
 public:
  using Error::Error;
};

// Hilbert space too large for dense exact diagonalization.
class SizeError : public Error {
 public:
  using Error::Error;
};

// <Psi_L|Psi_R> vanishes (self-orthogonality close to an exceptional point).
class SelfOrthogonalityError : public Error {
 public:
  using Error::Error;
};

// Function evaluated outside its domain (e.g. high-field series at eta <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bad run/train/checkpoint configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training gave up (persistent divergent ratios or non-finite gradients).
class TrainingAbortedError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhnqs
