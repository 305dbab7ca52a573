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

#ifndef CTCKIT_CLI_H_
#define CTCKIT_CLI_H_

#include <iosfwd>

namespace ctckit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// Runs one subcommand (train, predict, evaluate, loss, probas, gen-data).
// Progress goes to `out`; failures print a single JSON line to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace ctckit

#endif  // CTCKIT_CLI_H_
