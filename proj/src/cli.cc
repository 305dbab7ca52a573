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

#include "ctckit/cli.h"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctckit/dataset.h"
#include "ctckit/json_io.h"
#include "ctckit/model.h"

namespace ctckit {
namespace {

using nlohmann::json;

struct TrainArgs {
  std::string config;
  std::string data;
  std::string val;
  std::size_t epochs = 10;
  std::size_t batch_size = 16;
  double lr = 1e-3;
  std::string optimizer = "adam";
  std::uint64_t seed = 0;
  std::string out;
  std::optional<double> clip_norm;
  bool checkpoints = false;
};

struct ModelArgs {
  std::string model;
  std::string weights;
  std::string data;
  std::string out;
};

struct PredictArgs {
  ModelArgs io;
  bool greedy = false;
  std::optional<std::size_t> beam_width;
  std::optional<std::size_t> top_paths;
};

struct GenArgs {
  SyntheticOptions options;
  std::string out;
};

json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot write");
  return out;
}

void CheckWidth(const Dataset& data, const NetworkSpec& spec,
                const std::string& path) {
  if (data.feature_dim() != spec.feature_dim) {
    throw DataError(path + ": feature_dim " +
                    std::to_string(data.feature_dim()) + " but the model expects " +
                    std::to_string(spec.feature_dim));
  }
  if (data.num_labels() > spec.num_labels) {
    throw DataError(path + ": num_labels " + std::to_string(data.num_labels()) +
                    " exceeds the model's " + std::to_string(spec.num_labels));
  }
}

CtcModel LoadModel(const ModelArgs& args) {
  std::optional<std::filesystem::path> weights;
  if (!args.weights.empty()) weights = args.weights;
  return CtcModel::load(args.model, weights);
}

void RunTrain(const TrainArgs& args, std::ostream& out) {
  const json config = ReadJson(args.config);
  if (!config.is_object() || !config.contains("layers")) {
    throw DataError(args.config + ": config needs a 'layers' array");
  }
  const Dataset train = read_dataset(args.data);
  std::optional<Dataset> val;
  if (!args.val.empty()) {
    val = read_dataset(args.val);
    if (val->feature_dim() != train.feature_dim() ||
        val->num_labels() != train.num_labels()) {
      throw DataError(args.val + ": header differs from the training data");
    }
  }

  NetworkSpec spec;
  spec.feature_dim = train.feature_dim();
  spec.num_labels = train.num_labels();
  DecodeOptions decode;
  try {
    spec.layers = LayersFromJson(config["layers"]);
    if (config.contains("decode")) decode = DecodeOptionsFromJson(config["decode"]);
    spec.Validate();
  } catch (const Error& e) {
    throw DataError(args.config + ": " + e.what());
  }

  CtcModel model =
      CtcModel::compile(spec, args.optimizer, args.lr, decode, args.seed);
  model.set_clip_norm(args.clip_norm);

  FitOptions fit;
  fit.epochs = args.epochs;
  fit.batch_size = args.batch_size;
  fit.shuffle_seed = args.seed;
  if (val) fit.validation = &*val;
  if (args.checkpoints) fit.checkpoint_dir = args.out;
  fit.on_epoch = [&out](std::size_t epoch, const EpochRecord& record) {
    json line{{"epoch", epoch}, {"train_loss", record.train_loss}};
    if (record.validation_loss) line["validation_loss"] = *record.validation_loss;
    line["seconds"] = record.seconds;
    out << line.dump() << '\n' << std::flush;
  };
  model.fit(train, fit);
  model.save(args.out);
}

void RunPredict(const PredictArgs& args) {
  const CtcModel model = LoadModel(args.io);
  const Dataset data = read_dataset(args.io.data);
  CheckWidth(data, model.spec(), args.io.data);

  DecodeOptions decode = model.decode_options();
  if (args.greedy) {
    decode.greedy = true;
  } else if (args.beam_width || args.top_paths) {
    decode.greedy = false;
    if (args.beam_width) decode.beam_width = *args.beam_width;
    if (args.top_paths) decode.top_paths = *args.top_paths;
  }
  const std::vector<DecodeResult> results = model.predict(data, decode);

  std::ofstream out = OpenOut(args.io.out);
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t r = 0; r < results[i].paths.size(); ++r) {
      json line = ToJson(results[i].paths[r]);
      line["index"] = i;
      line["rank"] = r;
      out << line.dump() << '\n';
    }
  }
}

void RunEvaluate(const ModelArgs& args, const std::string& metric_list) {
  const std::set<Metric> metrics = ParseMetrics(metric_list);
  const CtcModel model = LoadModel(args);
  const Dataset data = read_dataset(args.data);
  CheckWidth(data, model.spec(), args.data);
  const MetricsReport report = model.evaluate(data, metrics);
  std::ofstream out = OpenOut(args.out);
  out << ReportToJson(report, metrics, data.size(), model.decode_options()).dump(2)
      << '\n';
}

void RunLoss(const ModelArgs& args) {
  const CtcModel model = LoadModel(args);
  const Dataset data = read_dataset(args.data);
  CheckWidth(data, model.spec(), args.data);
  const std::vector<double> losses = model.get_loss(data);
  std::ofstream out = OpenOut(args.out);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out << json{{"index", i}, {"loss", losses[i]}}.dump() << '\n';
  }
}

void RunProbas(const ModelArgs& args) {
  const CtcModel model = LoadModel(args);
  const Dataset data = read_dataset(args.data);
  CheckWidth(data, model.spec(), args.data);
  const std::vector<PosteriorMatrix> probas = model.get_probas(data);
  std::ofstream out = OpenOut(args.out);
  for (std::size_t i = 0; i < probas.size(); ++i) {
    json rows = json::array();
    for (Eigen::Index t = 0; t < probas[i].rows(); ++t) {
      json row = json::array();
      for (Eigen::Index k = 0; k < probas[i].cols(); ++k) {
        row.push_back(probas[i](t, k));
      }
      rows.push_back(std::move(row));
    }
    out << json{{"index", i}, {"probas", std::move(rows)}}.dump() << '\n';
  }
}

void RunGenData(const GenArgs& args) {
  write_dataset(generate_synthetic(args.options), args.out);
}

void ReportError(std::ostream& err, const char* category, const char* type,
                 const std::string& message, json extra = json::object()) {
  json line{{"error", category}, {"type", type}, {"message", message}};
  line.update(extra);
  err << line.dump() << '\n';
}

void AddModelOptions(CLI::App* cmd, ModelArgs& args) {
  cmd->add_option("--model", args.model, "Model directory")->required();
  cmd->add_option("--weights", args.weights,
                  "Weights file (defaults to <model>/weights.ctcw)");
  cmd->add_option("--data", args.data, "Dataset (JSON Lines)")->required();
  cmd->add_option("--out", args.out, "Output file")->required();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"CTC training, decoding and evaluation", "ctckit"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--config", train.config, "Network config (JSON)")
      ->required();
  train_cmd->add_option("--data", train.data, "Training set")->required();
  train_cmd->add_option("--val", train.val, "Validation set");
  train_cmd->add_option("--epochs", train.epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", train.batch_size)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.lr)->capture_default_str();
  train_cmd->add_option("--optimizer", train.optimizer, "sgd or adam")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--out", train.out, "Model directory")->required();
  train_cmd->add_option("--clip-norm", train.clip_norm,
                        "Clip gradients to this global norm");
  train_cmd->add_flag("--checkpoints", train.checkpoints,
                      "Write weights.epoch<N>.ctcw after every epoch");

  PredictArgs predict;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Decode a dataset");
  AddModelOptions(predict_cmd, predict.io);
  CLI::Option* greedy =
      predict_cmd->add_flag("--greedy", predict.greedy, "Best-path decoding");
  predict_cmd->add_option("--beam-width", predict.beam_width)->excludes(greedy);
  predict_cmd->add_option("--top-paths", predict.top_paths)->excludes(greedy);

  ModelArgs evaluate;
  std::string metrics = "loss,ler,ser";
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Score a dataset");
  AddModelOptions(evaluate_cmd, evaluate);
  evaluate_cmd->add_option("--metrics", metrics, "Subset of loss,ler,ser")
      ->capture_default_str();

  ModelArgs loss;
  AddModelOptions(
      app.add_subcommand("loss", "Per-sequence negative log-likelihood"), loss);

  ModelArgs probas;
  AddModelOptions(app.add_subcommand("probas", "Per-frame posteriors"), probas);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Synthetic dataset");
  gen_cmd->add_option("--num", gen.options.num_sequences)->capture_default_str();
  gen_cmd->add_option("--labels", gen.options.num_labels)->capture_default_str();
  gen_cmd->add_option("--feature-dim", gen.options.feature_dim)
      ->capture_default_str();
  gen_cmd->add_option("--sigma", gen.options.sigma)->capture_default_str();
  gen_cmd->add_option("--seed", gen.options.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    ReportError(err, "usage", "ParseError", e.what());
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) {
      RunTrain(train, out);
    } else if (predict_cmd->parsed()) {
      RunPredict(predict);
    } else if (evaluate_cmd->parsed()) {
      RunEvaluate(evaluate, metrics);
    } else if (app.got_subcommand("loss")) {
      RunLoss(loss);
    } else if (app.got_subcommand("probas")) {
      RunProbas(probas);
    } else if (gen_cmd->parsed()) {
      RunGenData(gen);
    }
  } catch (const InfeasibleAlignment& e) {
    json extra{{"input_len", e.input_len()},
               {"required_frames", e.required_frames()}};
    if (e.sequence_index()) extra["sequence_index"] = *e.sequence_index();
    ReportError(err, "data", "InfeasibleAlignment", e.what(), extra);
    return kExitData;
  } catch (const LoadError& e) {
    ReportError(err, "data", "LoadError", e.what(), {{"path", e.path()}});
    return kExitData;
  } catch (const DataError& e) {
    ReportError(err, "data", "DataError", e.what());
    return kExitData;
  } catch (const NonFiniteGradient& e) {
    ReportError(err, "numeric", "NonFiniteGradient", e.what());
    return kExitNumeric;
  } catch (const NumericError& e) {
    ReportError(err, "numeric", "NumericError", e.what());
    return kExitNumeric;
  } catch (const DomainError& e) {
    ReportError(err, "usage", "DomainError", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    ReportError(err, "data", "Error", e.what());
    return kExitData;
  }
  return kExitOk;
}

int cli_main(int argc, const char* const* argv) {
  return cli_main(argc, argv, std::cout, std::cerr);
}

}  // namespace ctckit
