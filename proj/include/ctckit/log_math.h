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

#ifndef CTCKIT_LOG_MATH_H_
#define CTCKIT_LOG_MATH_H_

#include <cmath>
#include <limits>
#include <span>

namespace ctckit {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow. Either argument may be kLogZero.
inline double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) return b + std::log1p(std::exp(a - b));
  return a + std::log1p(std::exp(b - a));
}

// log(sum_i exp(values[i])) via max-shift. Empty input and all-kLogZero
// input both yield kLogZero. Throws DomainError on NaN.
double log_sum_exp(std::span<const double> values);

// log(x), mapping 0 to kLogZero.
inline double SafeLog(double x) { return x > 0.0 ? std::log(x) : kLogZero; }

}  // namespace ctckit

#endif  // CTCKIT_LOG_MATH_H_
