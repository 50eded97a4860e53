// Copyright 2026 The mitiq-forge Authors
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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter vector length does not match the ansatz shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  DecompositionError(std::size_t gate_index, const std::string& what)
      : Error(what + " (gate " + std::to_string(gate_index) + ")"),
        gate_index_(gate_index) {}
  std::size_t gate_index() const { return gate_index_; }

 private:
  std::size_t gate_index_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds what the dense/statevector routines support.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class SupportError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NonInvertibleError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// An exponential fit could not be formed. `fallback()` carries the raw
// (unextrapolated) value when the caller had one to offer.
class FitError : public Error {
 public:
  explicit FitError(const std::string& what,
                    std::optional<double> fallback = std::nullopt)
      : Error(what), fallback_(fallback) {}
  const std::optional<double>& fallback() const { return fallback_; }

 private:
  std::optional<double> fallback_;
};

}  // namespace mf
