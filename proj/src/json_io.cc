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

#include "ctckit/json_io.h"

#include <string>

namespace ctckit {

using nlohmann::json;

namespace {

const json& Field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw DataError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::size_t Count(const json& j, const char* key) {
  const json& v = Field(j, key);
  if (!v.is_number_unsigned()) {
    throw DataError(std::string("field '") + key +
                    "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

json ToJson(const LayerSpec& layer) {
  return json{{"kind", std::string(LayerKindName(layer.kind))},
              {"units", layer.units},
              {"bidirectional", layer.bidirectional}};
}

json ToJson(const NetworkSpec& spec) {
  json layers = json::array();
  for (const LayerSpec& layer : spec.layers) layers.push_back(ToJson(layer));
  return json{{"feature_dim", spec.feature_dim},
              {"layers", std::move(layers)},
              {"num_labels", spec.num_labels}};
}

json ToJson(const DecodeOptions& decode) {
  return json{{"greedy", decode.greedy},
              {"beam_width", decode.beam_width},
              {"top_paths", decode.top_paths}};
}

json ToJson(const Hypothesis& hypothesis) {
  return json{{"labels", hypothesis.labels}, {"score", hypothesis.score}};
}

LayerSpec LayerSpecFromJson(const json& j) {
  LayerSpec layer;
  const json& kind = Field(j, "kind");
  if (!kind.is_string()) throw DataError("layer 'kind' must be a string");
  try {
    layer.kind = ParseLayerKind(kind.get<std::string>());
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
  layer.units = Count(j, "units");
  if (j.contains("bidirectional")) {
    if (!j["bidirectional"].is_boolean()) {
      throw DataError("layer 'bidirectional' must be a boolean");
    }
    layer.bidirectional = j["bidirectional"].get<bool>();
  }
  return layer;
}

std::vector<LayerSpec> LayersFromJson(const json& j) {
  if (!j.is_array()) throw DataError("'layers' must be an array");
  std::vector<LayerSpec> layers;
  for (const json& layer : j) layers.push_back(LayerSpecFromJson(layer));
  return layers;
}

NetworkSpec NetworkSpecFromJson(const json& j) {
  NetworkSpec spec;
  spec.feature_dim = Count(j, "feature_dim");
  spec.num_labels = Count(j, "num_labels");
  spec.layers = LayersFromJson(Field(j, "layers"));
  try {
    spec.Validate();
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
  return spec;
}

DecodeOptions DecodeOptionsFromJson(const json& j) {
  DecodeOptions decode;
  if (!j.is_object()) throw DataError("decode options must be an object");
  if (j.contains("greedy")) {
    if (!j["greedy"].is_boolean()) throw DataError("'greedy' must be boolean");
    decode.greedy = j["greedy"].get<bool>();
  }
  if (j.contains("beam_width")) decode.beam_width = Count(j, "beam_width");
  if (j.contains("top_paths")) decode.top_paths = Count(j, "top_paths");
  try {
    decode.Validate();
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
  return decode;
}

json ReportToJson(const MetricsReport& report, const std::set<Metric>& metrics,
                  std::size_t num_sequences, const DecodeOptions& decode) {
  json names = json::array();
  for (Metric m : metrics) names.push_back(std::string(MetricName(m)));
  json out{{"metrics", std::move(names)},
           {"num_sequences", num_sequences},
           {"decode", ToJson(decode)}};
  if (report.loss) out["loss"] = *report.loss;
  if (report.ler) out["ler"] = *report.ler;
  if (report.ler_mean) out["ler_mean"] = *report.ler_mean;
  if (report.ser) out["ser"] = *report.ser;
  return out;
}

}  // namespace ctckit
