/* Copyright 2026 The ctckit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CTCKIT_TYPES_H_
#define CTCKIT_TYPES_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ctckit {

// Row-major so that a frame is a contiguous row.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Labels over the non-blank alphabet [0, num_labels).
using LabelSequence = std::vector<int>;

// One class per frame, blank included.
using Path = std::vector<int>;

// Per-frame class probabilities, T x K, blank in the last column.
using PosteriorMatrix = Matrix;

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain (shape, range, normalization).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The label sequence needs more frames than the input provides.
class InfeasibleAlignment : public Error {
 public:
  InfeasibleAlignment(std::size_t input_len, std::size_t required,
                      std::optional<std::size_t> sequence_index = {});

  std::size_t input_len() const { return input_len_; }
  std::size_t required_frames() const { return required_; }
  const std::optional<std::size_t>& sequence_index() const {
    return sequence_index_;
  }

  InfeasibleAlignment WithIndex(std::size_t index) const {
    return InfeasibleAlignment(input_len_, required_, index);
  }

 private:
  std::size_t input_len_;
  std::size_t required_;
  std::optional<std::size_t> sequence_index_;
};

// Exhaustive enumeration would exceed its budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Non-finite values where finite ones are required (likelihoods, gradients).
class NumericError : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradient : public NumericError {
 public:
  using NumericError::NumericError;
};

// Malformed or inconsistent input data (datasets, configs).
class DataError : public Error {
 public:
  using Error::Error;
};

// Model directory could not be restored. path() names the offending file.
class LoadError : public DataError {
 public:
  LoadError(std::string path, const std::string& what)
      : DataError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace ctckit

#endif  // CTCKIT_TYPES_H_
