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

// JSON views of the model-facing types. Parsing errors throw DataError.

#ifndef CTCKIT_JSON_IO_H_
#define CTCKIT_JSON_IO_H_

#include <set>
#include <vector>

#include "json.hpp"

#include "ctckit/decode.h"
#include "ctckit/model.h"
#include "ctckit/net.h"

namespace ctckit {

nlohmann::json ToJson(const LayerSpec& layer);
nlohmann::json ToJson(const NetworkSpec& spec);
nlohmann::json ToJson(const DecodeOptions& decode);
nlohmann::json ToJson(const Hypothesis& hypothesis);

LayerSpec LayerSpecFromJson(const nlohmann::json& j);
std::vector<LayerSpec> LayersFromJson(const nlohmann::json& j);
NetworkSpec NetworkSpecFromJson(const nlohmann::json& j);
DecodeOptions DecodeOptionsFromJson(const nlohmann::json& j);

// Only the requested metrics appear, plus "metrics", "num_sequences" and
// "decode" metadata.
nlohmann::json ReportToJson(const MetricsReport& report,
                            const std::set<Metric>& metrics,
                            std::size_t num_sequences,
                            const DecodeOptions& decode);

}  // namespace ctckit

#endif  // CTCKIT_JSON_IO_H_
