// Copyright 2026 The rtqe Authors
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

#ifndef RTQE_ERROR_HPP
#define RTQE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace rtqe {

/// Broad failure class; the CLI maps each to an exit code.
enum class ErrorCategory {
  config,     // exit 1
  data,       // exit 2
  transport,  // exit 3
  math,       // exit 2 when it escapes to the CLI
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class MathError : public Error {
 public:
  explicit MathError(const std::string& what)
      : Error(ErrorCategory::math, what) {}
};

/// HTTP or socket failure. `status` is 0 when no response was received.
class TransportError : public Error {
 public:
  TransportError(int status, std::string body)
      : Error(ErrorCategory::transport,
              "transport error (status " + std::to_string(status) + "): " + body),
        status_(status),
        body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

  // Position of the failing chunk inside the batch that was submitted.
  std::size_t chunk_offset = 0;
  std::size_t chunk_size = 0;

 private:
  int status_;
  std::string body_;
};

// Math-layer errors, named after the contract cases they represent.

class DimensionMismatch : public MathError {
 public:
  DimensionMismatch(std::size_t a, std::size_t b)
      : MathError("dimension mismatch: " + std::to_string(a) + " vs " +
                  std::to_string(b)) {}
};

class ZeroVector : public MathError {
 public:
  ZeroVector() : MathError("cosine similarity of an all-zero vector") {}
};

class LengthMismatch : public MathError {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : MathError("length mismatch: " + std::to_string(a) + " vs " +
                  std::to_string(b)) {}
};

class ConstantSeries : public MathError {
 public:
  ConstantSeries() : MathError("correlation of a constant series") {}
};

class TooFewValues : public MathError {
 public:
  TooFewValues(std::size_t got, std::size_t need)
      : MathError("too few values: " + std::to_string(got) + " (need " +
                  std::to_string(need) + ")") {}
};

}  // namespace rtqe

#endif  // RTQE_ERROR_HPP
