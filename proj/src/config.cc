// Copyright 2026 The OTCIL Authors. All Rights Reserved.
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

#include "otcil/config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <utility>

#include "otcil/errors.h"

namespace otcil {
namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so that typos
// are reported instead of silently ignored.
class Node {
 public:
  Node(const json& value, std::string path)
      : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool Has(const std::string& key) const { return value_.contains(key); }

  template <typename T>
  T Get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!value_.contains(key)) return fallback;
    try {
      return value_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(Path(key) + ": wrong value type");
    }
  }

  const json& Raw(const std::string& key) {
    used_.insert(key);
    return value_.at(key);
  }

  Node Child(const std::string& key) {
    used_.insert(key);
    static const json kEmpty = json::object();
    return Node(value_.contains(key) ? value_.at(key) : kEmpty, Path(key));
  }

  void Finish() const {
    for (const auto& item : value_.items()) {
      if (!used_.count(item.key())) {
        throw ConfigError(Path(item.key()) + ": unknown key");
      }
    }
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename F>
auto Translate(const std::string& where, F&& parse) {
  try {
    return parse();
  } catch (const ContractError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::string Resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path.string();
  return (base / path).lexically_normal().string();
}

void RequireFile(const std::string& field, const std::string& path) {
  if (path.empty()) throw ConfigError(field + ": path is required");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ConfigError(field + ": file not found: " + path);
  }
}

char ParseDelimiter(const std::string& text) {
  if (text == "\\t" || text == "tab") return '\t';
  if (text.size() != 1) {
    throw ConfigError("dataset.csv.delimiter: expected a single character");
  }
  return text[0];
}

void ParseSyntheticInto(Node& node, SyntheticSpec& spec) {
  spec.classes = node.Get("classes", spec.classes);
  spec.dims = node.Get("dims", spec.dims);
  spec.separation = node.Get("separation", spec.separation);
  spec.samples_per_class = node.Get("samples_per_class", spec.samples_per_class);
  spec.test_per_class = node.Get("test_per_class", spec.test_per_class);
}

}  // namespace

std::string_view CadenceName(Cadence cadence) {
  return cadence == Cadence::kEveryBatch ? "every_batch" : "every_task";
}

std::string_view DataSourceName(DataSource source) {
  switch (source) {
    case DataSource::kSynthetic: return "synthetic";
    case DataSource::kIdx: return "idx";
    case DataSource::kCsv: return "csv";
  }
  return "synthetic";
}

SyntheticSpec ParseSyntheticSpec(const nlohmann::json& tree) {
  Node node(tree, "");
  SyntheticSpec spec;
  ParseSyntheticInto(node, spec);
  spec.seed = node.Get<uint64_t>("seed", spec.seed);
  node.Finish();
  if (spec.classes < 1 || spec.dims < 1 || spec.samples_per_class < 1 ||
      spec.test_per_class < 1) {
    throw ConfigError("synthetic spec: sizes must be >= 1");
  }
  return spec;
}

nlohmann::json SyntheticSpecToJson(const SyntheticSpec& spec) {
  return {{"classes", spec.classes},
          {"dims", spec.dims},
          {"separation", spec.separation},
          {"samples_per_class", spec.samples_per_class},
          {"test_per_class", spec.test_per_class},
          {"seed", spec.seed}};
}

RunConfig ParseRunConfig(const nlohmann::json& tree,
                         const std::filesystem::path& base_dir) {
  RunConfig c;
  Node root(tree, "");

  Node dataset = root.Child("dataset");
  const auto source = dataset.Get<std::string>("source", "synthetic");
  if (source == "synthetic") {
    c.dataset.source = DataSource::kSynthetic;
  } else if (source == "idx") {
    c.dataset.source = DataSource::kIdx;
  } else if (source == "csv") {
    c.dataset.source = DataSource::kCsv;
  } else {
    throw ConfigError("dataset.source: unknown value '" + source + "'");
  }
  if (dataset.Has("synthetic")) {
    Node syn = dataset.Child("synthetic");
    ParseSyntheticInto(syn, c.dataset.synthetic);
    syn.Finish();
  }
  if (dataset.Has("idx")) {
    Node idx = dataset.Child("idx");
    auto& p = c.dataset.idx;
    p.train_images = Resolve(base_dir, idx.Get<std::string>("train_images", ""));
    p.train_labels = Resolve(base_dir, idx.Get<std::string>("train_labels", ""));
    p.test_images = Resolve(base_dir, idx.Get<std::string>("test_images", ""));
    p.test_labels = Resolve(base_dir, idx.Get<std::string>("test_labels", ""));
    idx.Finish();
  }
  if (dataset.Has("csv")) {
    Node csv = dataset.Child("csv");
    auto& p = c.dataset.csv;
    p.train = Resolve(base_dir, csv.Get<std::string>("train", ""));
    p.test = Resolve(base_dir, csv.Get<std::string>("test", ""));
    p.schema.label_column = csv.Get("label_column", p.schema.label_column);
    p.schema.delimiter = ParseDelimiter(csv.Get<std::string>("delimiter", ","));
    p.schema.header = csv.Get("header", p.schema.header);
    p.schema.classes = csv.Get("classes", p.schema.classes);
    csv.Finish();
  }
  dataset.Finish();

  Node split = root.Child("task_split");
  c.task_split.tasks = split.Get("tasks", c.task_split.tasks);
  c.task_split.shuffle_within_task =
      split.Get("shuffle_within_task", c.task_split.shuffle_within_task);
  c.task_split.batches_per_class =
      split.Get("batches_per_class", c.task_split.batches_per_class);
  split.Finish();

  c.batch_size = root.Get("batch_size", c.batch_size);

  Node net = root.Child("network");
  c.network.layers = net.Get("layers", c.network.layers);
  c.network.nodes = net.Get("nodes", c.network.nodes);
  c.network.activation = Translate("network.activation", [&] {
    return ParseActivation(net.Get<std::string>("activation", "relu"));
  });
  if (net.Has("lambda")) {
    const json& lam = net.Raw("lambda");
    if (lam.is_number()) {
      c.network.lambdas = {lam.get<double>()};
    } else if (lam.is_array() && !lam.empty() &&
               std::all_of(lam.begin(), lam.end(),
                           [](const json& v) { return v.is_number(); })) {
      c.network.lambdas = lam.get<std::vector<double>>();
    } else {
      throw ConfigError("network.lambda: expected a number or numeric array");
    }
  }
  c.network.standardize_inputs =
      net.Get("standardize_inputs", c.network.standardize_inputs);
  c.network.ensemble = Translate("network.ensemble", [&] {
    return ParseEnsembleMode(net.Get<std::string>("ensemble", "mean"));
  });
  net.Finish();

  Node style = root.Child("style");
  c.style.kind = Translate("style.kind", [&] {
    return ParseRegKind(style.Get<std::string>("kind", "ridge"));
  });
  c.style.k = style.Get("k", c.style.k);
  c.style.kappa = style.Get("kappa", c.style.kappa);
  c.style.sigma = style.Get("sigma", c.style.sigma);
  c.style.init_mode = Translate("style.init_mode", [&] {
    return ParseInitMode(style.Get<std::string>("init_mode", "exact"));
  });
  c.style.k_source = Translate("style.k_source", [&] {
    return ParseKSource(style.Get<std::string>("k_source", "pseudo_incomplete"));
  });
  c.style.fast_k = Translate("style.fast_k", [&] {
    return ParseFastK(style.Get<std::string>("fast_k", "off"));
  });
  c.style.k_min = style.Get("k_min", c.style.k_min);
  c.style.k_max = style.Get("k_max", c.style.k_max);
  style.Finish();

  Node eval = root.Child("evaluation");
  const auto cadence = eval.Get<std::string>("cadence", "every_batch");
  if (cadence == "every_batch") {
    c.cadence = Cadence::kEveryBatch;
  } else if (cadence == "every_task") {
    c.cadence = Cadence::kEveryTask;
  } else {
    throw ConfigError("evaluation.cadence: unknown value '" + cadence + "'");
  }
  if (eval.Has("baselines")) {
    const auto names = eval.Get<std::vector<std::string>>("baselines", {});
    c.baselines.clear();
    for (const auto& name : names) {
      c.baselines.push_back(Translate("evaluation.baselines",
                                      [&] { return ParseBaselineKind(name); }));
    }
  }
  eval.Finish();

  c.output_dir = root.Get<std::string>("output_dir", c.output_dir);

  Node seeds = root.Child("seeds");
  c.seeds.weights = seeds.Get<uint64_t>("weights", c.seeds.weights);
  c.seeds.order = seeds.Get<uint64_t>("order", c.seeds.order);
  c.seeds.synthetic = seeds.Get<uint64_t>("synthetic", c.seeds.synthetic);
  seeds.Finish();

  c.repeats = root.Get("repeats", c.repeats);
  const auto exec = root.Get<std::string>("execution", "parallel");
  if (exec == "parallel") {
    c.execution = Execution::kParallel;
  } else if (exec == "serial") {
    c.execution = Execution::kSerial;
  } else {
    throw ConfigError("execution: unknown value '" + exec + "'");
  }
  root.Finish();

  c.network.seed = c.seeds.weights;
  c.task_split.order_seed = c.seeds.order;
  c.dataset.synthetic.seed = c.seeds.synthetic;
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json tree;
  try {
    tree = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return ParseRunConfig(tree, path.parent_path());
}

void RunConfig::Validate() const {
  if (repeats < 1) throw ConfigError("repeats: must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size: must be >= 1");
  if (task_split.tasks < 1) throw ConfigError("task_split.tasks: must be >= 1");
  if (task_split.batches_per_class < 0) {
    throw ConfigError("task_split.batches_per_class: must be >= 0");
  }
  NetworkConfig net = network;
  net.input_dim = std::max(net.input_dim, 1);
  net.classes = std::max(net.classes, 1);
  Translate("network", [&] {
    net.Validate();
    return 0;
  });
  Translate("style", [&] {
    style.Validate();
    return 0;
  });
  if (output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  switch (dataset.source) {
    case DataSource::kSynthetic: {
      const auto& s = dataset.synthetic;
      if (s.classes < 1 || s.dims < 1 || s.samples_per_class < 1 ||
          s.test_per_class < 1) {
        throw ConfigError("dataset.synthetic: sizes must be >= 1");
      }
      if (s.classes % task_split.tasks != 0) {
        throw ConfigError("task_split.tasks: must divide the class load");
      }
      break;
    }
    case DataSource::kIdx:
      RequireFile("dataset.idx.train_images", dataset.idx.train_images);
      RequireFile("dataset.idx.train_labels", dataset.idx.train_labels);
      RequireFile("dataset.idx.test_images", dataset.idx.test_images);
      RequireFile("dataset.idx.test_labels", dataset.idx.test_labels);
      break;
    case DataSource::kCsv:
      RequireFile("dataset.csv.train", dataset.csv.train);
      RequireFile("dataset.csv.test", dataset.csv.test);
      break;
  }
}

nlohmann::json RunConfigToJson(const RunConfig& c) {
  json dataset = {{"source", DataSourceName(c.dataset.source)}};
  switch (c.dataset.source) {
    case DataSource::kSynthetic: {
      json syn = SyntheticSpecToJson(c.dataset.synthetic);
      syn.erase("seed");
      dataset["synthetic"] = syn;
      break;
    }
    case DataSource::kIdx:
      dataset["idx"] = {{"train_images", c.dataset.idx.train_images},
                        {"train_labels", c.dataset.idx.train_labels},
                        {"test_images", c.dataset.idx.test_images},
                        {"test_labels", c.dataset.idx.test_labels}};
      break;
    case DataSource::kCsv: {
      const auto& s = c.dataset.csv.schema;
      dataset["csv"] = {
          {"train", c.dataset.csv.train},
          {"test", c.dataset.csv.test},
          {"label_column", s.label_column},
          {"delimiter", s.delimiter == '\t' ? std::string("\\t")
                                            : std::string(1, s.delimiter)},
          {"header", s.header},
          {"classes", s.classes}};
      break;
    }
  }
  json baselines = json::array();
  for (BaselineKind b : c.baselines) baselines.push_back(BaselineKindName(b));
  return {
      {"dataset", dataset},
      {"task_split",
       {{"tasks", c.task_split.tasks},
        {"shuffle_within_task", c.task_split.shuffle_within_task},
        {"batches_per_class", c.task_split.batches_per_class}}},
      {"batch_size", c.batch_size},
      {"network",
       {{"layers", c.network.layers},
        {"nodes", c.network.nodes},
        {"activation", ActivationName(c.network.activation)},
        {"lambda", c.network.lambdas},
        {"standardize_inputs", c.network.standardize_inputs},
        {"ensemble", EnsembleModeName(c.network.ensemble)}}},
      {"style",
       {{"kind", RegKindName(c.style.kind)},
        {"k", c.style.k},
        {"kappa", c.style.kappa},
        {"sigma", c.style.sigma},
        {"init_mode", InitModeName(c.style.init_mode)},
        {"k_source", KSourceName(c.style.k_source)},
        {"fast_k", FastKName(c.style.fast_k)},
        {"k_min", c.style.k_min},
        {"k_max", c.style.k_max}}},
      {"evaluation",
       {{"cadence", CadenceName(c.cadence)}, {"baselines", baselines}}},
      {"output_dir", c.output_dir},
      {"seeds",
       {{"weights", c.seeds.weights},
        {"order", c.seeds.order},
        {"synthetic", c.seeds.synthetic}}},
      {"repeats", c.repeats},
      {"execution",
       c.execution == Execution::kParallel ? "parallel" : "serial"}};
}

}  // namespace otcil
