// Copyright 2026 The guided-ardm Authors
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
// ==============================================================================

#include "gardm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "gardm/error.hpp"

namespace gardm {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kArdm:
      return "ARDM";
    case Method::kArdg:
      return "ARDG";
    case Method::kBsdg:
      return "BSDG";
    case Method::kFadg:
      return "FADG";
  }
  return "ARDM";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "ARDM") return Method::kArdm;
  if (name == "ARDG") return Method::kArdg;
  if (name == "BSDG") return Method::kBsdg;
  if (name == "FADG") return Method::kFadg;
  return std::nullopt;
}

bool is_smc(Method method) noexcept {
  return method == Method::kBsdg || method == Method::kFadg;
}

namespace {

using nlohmann::json;

constexpr std::string_view kSourceNames[] = {"uniform", "random", "table", "fit",
                                             "validity_rejection"};
constexpr std::string_view kScheduleNames[] = {"final_exact", "all_steps", "linear"};
constexpr std::string_view kDiscriminatorNames[] = {"optimal", "corrupt", "constant"};

template <typename Enum, std::size_t N>
Enum parse_name(const json& value, const std::string_view (&names)[N], const std::string& at) {
  if (!value.is_string()) throw ConfigError(at, "expected a string");
  const auto name = value.get<std::string>();
  for (std::size_t k = 0; k < N; ++k) {
    if (names[k] == name) return static_cast<Enum>(k);
  }
  std::string allowed;
  for (std::size_t k = 0; k < N; ++k) allowed += (k ? ", " : "") + std::string(names[k]);
  throw ConfigError(at, "unknown value \"" + name + "\" (expected one of " + allowed + ")");
}

bool is_non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Reads the fields of one object, rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        throw ConfigError(at(key), "wrong type");
      }
    }
  }

  void read_number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(at(key), "expected a number");
      out = v->get<double>();
    }
  }

  void read_count(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!is_non_negative_integer(*v)) {
        throw ConfigError(at(key), "expected a non-negative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& at, const std::string& message) {
  if (!ok) throw ConfigError(at, message);
}

DomainSpec parse_domain(const json& doc) {
  ObjectReader r(doc, "/domain");
  DomainSpec spec;
  const json* kind = r.find("kind");
  require(kind != nullptr, r.at("kind"), "required field missing");
  const std::string_view kinds[] = {"sequence", "graph"};
  spec.kind = parse_name<DomainKind>(*kind, kinds, r.at("kind"));
  if (spec.kind == DomainKind::kSequence) {
    r.read("categories", spec.categories);
    require(!spec.categories.empty(), r.at("categories"), "need at least one variable");
    for (int d : spec.categories) require(d >= 1, r.at("categories"), "category counts must be >= 1");
    require(Domain(spec.categories).state_count() <= kDefaultStateLimit, r.at("categories"),
            "product space exceeds " + std::to_string(kDefaultStateLimit) + " states");
  } else {
    r.read("node_categories", spec.node_categories);
    r.read("edge_categories", spec.edge_categories);
    require(spec.node_categories >= 1, r.at("node_categories"), "must be >= 1");
    require(spec.edge_categories >= 2, r.at("edge_categories"), "must be >= 2");
  }
  r.finish();
  return spec;
}

DataSpec parse_data(const json& doc, const DomainSpec& domain) {
  ObjectReader r(doc, "/p_data");
  DataSpec spec;
  if (const json* v = r.find("source")) {
    spec.source = parse_name<DataSource>(*v, kSourceNames, r.at("source"));
  }
  if (const json* v = r.find("table")) spec.table = *v;
  r.read("path", spec.path);
  r.read_number("smoothing", spec.smoothing);
  r.read_number("concentration", spec.concentration);
  if (const json* v = r.find("node_count_weights")) {
    require(v->is_object() && !v->empty(), r.at("node_count_weights"),
            "expected a non-empty object of node count -> weight");
    spec.node_count_weights.clear();
    for (auto it = v->begin(); it != v->end(); ++it) {
      const std::string at = r.at("node_count_weights") + "/" + it.key();
      std::size_t n = 0;
      try {
        n = std::stoul(it.key());
      } catch (const std::exception&) {
        throw ConfigError(at, "keys must be node counts");
      }
      require(n >= 1, at, "node count must be >= 1");
      require(it->is_number() && it->get<double>() > 0.0, at, "weight must be a positive number");
      spec.node_count_weights[n] = it->get<double>();
    }
  }
  r.read_count("dataset_size", spec.dataset_size);
  r.finish();

  require(spec.smoothing >= 0.0, r.at("smoothing"), "must be >= 0");
  require(spec.concentration > 0.0, r.at("concentration"), "must be > 0");
  const DataSource source = spec.source.value_or(
      domain.kind == DomainKind::kGraph ? DataSource::kValidityRejection : DataSource::kRandom);
  if (domain.kind == DomainKind::kSequence) {
    require(source != DataSource::kValidityRejection, r.at("source"),
            "validity_rejection needs a graph domain");
    if (source == DataSource::kTable) {
      require(!spec.table.is_null() || !spec.path.empty(), r.at("table"),
              "table source needs an inline table or a path");
    }
  } else {
    require(source != DataSource::kTable, r.at("source"), "table source needs a sequence domain");
    for (const auto& [n, w] : spec.node_count_weights) {
      const GraphLayout layout(n, domain.node_categories, domain.edge_categories);
      require(layout.domain()->state_count() <= kDefaultStateLimit,
              r.at("node_count_weights") + "/" + std::to_string(n),
              "graph with " + std::to_string(n) + " nodes exceeds the tabular state limit");
    }
    if (source == DataSource::kValidityRejection) {
      require(spec.dataset_size >= 1, r.at("dataset_size"), "must be >= 1");
    }
  }
  if (source == DataSource::kFit) require(!spec.path.empty(), r.at("path"), "fit needs a path");
  return spec;
}

PerturbationSpec parse_perturbation(const json& doc, const DomainSpec& domain) {
  ObjectReader r(doc, "/perturbation");
  PerturbationSpec spec;
  r.read_number("temperature", spec.temperature);
  r.read_number("uniform_mix", spec.uniform_mix);
  if (const json* v = r.find("table")) spec.table = *v;
  r.finish();
  require(spec.temperature > 0.0, r.at("temperature"), "must be > 0");
  require(spec.uniform_mix >= 0.0 && spec.uniform_mix <= 1.0, r.at("uniform_mix"),
          "must lie in [0, 1]");
  require(spec.table.is_null() || domain.kind == DomainKind::kSequence, r.at("table"),
          "explicit p_theta tables need a sequence domain");
  return spec;
}

DiscriminatorSpec parse_discriminator(const json& doc) {
  ObjectReader r(doc, "/discriminator");
  DiscriminatorSpec spec;
  if (const json* v = r.find("kind")) {
    spec.kind = parse_name<DiscriminatorKind>(*v, kDiscriminatorNames, r.at("kind"));
  }
  r.read_number("epsilon", spec.epsilon);
  if (const json* v = r.find("schedule")) {
    spec.schedule = parse_name<AttenuationSchedule>(*v, kScheduleNames, r.at("schedule"));
  }
  r.read_number("logit", spec.logit);
  r.finish();
  require(spec.epsilon >= 0.0 && spec.epsilon <= 1.0, r.at("epsilon"), "must lie in [0, 1]");
  return spec;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  ObjectReader r(doc, "");
  RunConfig config;
  const json* domain = r.find("domain");
  require(domain != nullptr, "/domain", "required field missing");
  config.domain = parse_domain(*domain);
  if (const json* v = r.find("p_data")) config.p_data = parse_data(*v, config.domain);
  if (const json* v = r.find("perturbation")) {
    config.perturbation = parse_perturbation(*v, config.domain);
  }
  if (const json* v = r.find("discriminator")) config.discriminator = parse_discriminator(*v);
  if (const json* v = r.find("methods")) {
    require(v->is_array() && !v->empty(), "/methods", "expected a non-empty array");
    config.methods.clear();
    for (std::size_t k = 0; k < v->size(); ++k) {
      const std::string at = "/methods/" + std::to_string(k);
      require((*v)[k].is_string(), at, "expected a method name");
      const auto m = parse_method((*v)[k].get<std::string>());
      require(m.has_value(), at, "unknown method (expected ARDM, ARDG, BSDG or FADG)");
      config.methods.push_back(*m);
    }
  }
  if (const json* v = r.find("orders")) {
    require(v->is_array() && !v->empty(), "/orders", "expected a non-empty array");
    config.orders.clear();
    for (std::size_t k = 0; k < v->size(); ++k) {
      const std::string at = "/orders/" + std::to_string(k);
      require((*v)[k].is_string(), at, "expected an order name");
      const auto o = parse_order_kind((*v)[k].get<std::string>());
      require(o.has_value(), at, "unknown order (expected uniform, NsEs or NEsN)");
      require(*o == OrderKind::kUniform || config.domain.kind == DomainKind::kGraph, at,
              "node/edge orders need a graph domain");
      config.orders.push_back(*o);
    }
  }
  r.read_count("particles", config.particles);
  r.read_number("ess_threshold", config.ess_threshold);
  r.read_count("samples", config.samples);
  if (const json* v = r.find("seed")) {
    require(is_non_negative_integer(*v), "/seed", "expected an unsigned 64-bit integer");
    config.seed = v->get<std::uint64_t>();
  }
  r.read("keep_all_particles", config.keep_all_particles);
  r.read("output_dir", config.output_dir);
  r.finish();
  require(config.particles >= 1, "/particles", "must be >= 1");
  require(config.ess_threshold > 0.0 && config.ess_threshold <= 1.0, "/ess_threshold",
          "must lie in (0, 1]");
  return config;
}

json to_json(const RunConfig& c) {
  json domain;
  if (c.domain.kind == DomainKind::kSequence) {
    domain = {{"kind", "sequence"}, {"categories", c.domain.categories}};
  } else {
    domain = {{"kind", "graph"},
              {"node_categories", c.domain.node_categories},
              {"edge_categories", c.domain.edge_categories}};
  }
  json data = {{"path", c.p_data.path},
               {"smoothing", c.p_data.smoothing},
               {"concentration", c.p_data.concentration},
               {"dataset_size", c.p_data.dataset_size}};
  if (c.p_data.source) data["source"] = kSourceNames[static_cast<std::size_t>(*c.p_data.source)];
  if (!c.p_data.table.is_null()) data["table"] = c.p_data.table;
  json weights = json::object();
  for (const auto& [n, w] : c.p_data.node_count_weights) weights[std::to_string(n)] = w;
  data["node_count_weights"] = std::move(weights);

  json perturbation = {{"temperature", c.perturbation.temperature},
                       {"uniform_mix", c.perturbation.uniform_mix}};
  if (!c.perturbation.table.is_null()) perturbation["table"] = c.perturbation.table;

  json disc = {{"kind", kDiscriminatorNames[static_cast<std::size_t>(c.discriminator.kind)]},
               {"epsilon", c.discriminator.epsilon},
               {"schedule", kScheduleNames[static_cast<std::size_t>(c.discriminator.schedule)]},
               {"logit", c.discriminator.logit}};
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  json orders = json::array();
  for (OrderKind o : c.orders) orders.push_back(to_string(o));
  return {{"domain", std::move(domain)},
          {"p_data", std::move(data)},
          {"perturbation", std::move(perturbation)},
          {"discriminator", std::move(disc)},
          {"methods", std::move(methods)},
          {"orders", std::move(orders)},
          {"particles", c.particles},
          {"ess_threshold", c.ess_threshold},
          {"samples", c.samples},
          {"seed", c.seed},
          {"keep_all_particles", c.keep_all_particles},
          {"output_dir", c.output_dir}};
}

std::size_t locate_line(std::string_view text, std::string_view pointer) {
  const auto slash = pointer.rfind('/');
  std::string key(slash == std::string_view::npos ? pointer : pointer.substr(slash + 1));
  // Array indices point at the enclosing key.
  if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos && slash != 0 &&
      slash != std::string_view::npos) {
    const auto prev = pointer.substr(0, slash);
    const auto s2 = prev.rfind('/');
    key = std::string(prev.substr(s2 == std::string_view::npos ? 0 : s2 + 1));
  }
  if (key.empty()) return 1;
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string_view::npos) return 1;
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

DiscriminatorPtr build_discriminator(const DiscriminatorSpec& spec, JointPtr p_data,
                                     JointPtr p_theta) {
  switch (spec.kind) {
    case DiscriminatorKind::kOptimal:
      return optimal_discriminator(std::move(p_data), std::move(p_theta));
    case DiscriminatorKind::kCorrupt:
      return corrupt(optimal_discriminator(std::move(p_data), std::move(p_theta)), spec.epsilon,
                     spec.schedule);
    case DiscriminatorKind::kConstant:
      return std::make_shared<ConstantDiscriminator>(spec.logit);
  }
  throw ContractViolation("unknown discriminator kind");
}

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open " + path.string());
  return json::parse(in);
}

std::vector<json> read_json_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(json::parse(line));
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

JointPtr load_table(const json& inline_table, const std::string& path,
                    const std::filesystem::path& base, const DomainPtr& domain) {
  TabularJoint joint =
      tabular_from_json(inline_table.is_null() ? read_json_file(resolve(base, path)) : inline_table);
  if (!(*joint.domain() == *domain)) {
    throw ContractViolation("table categories do not match the configured domain");
  }
  return std::make_shared<const TabularJoint>(TabularJoint(domain, std::vector<double>(
                                                                       joint.probs().begin(),
                                                                       joint.probs().end())));
}

DimensionCase finish_case(const RunConfig& config, DimensionCase c, JointPtr p_theta_override) {
  c.p_theta = p_theta_override
                  ? std::move(p_theta_override)
                  : std::make_shared<const TabularJoint>(perturb(
                        *c.p_data, config.perturbation.temperature, config.perturbation.uniform_mix));
  c.discriminator = build_discriminator(config.discriminator, c.p_data, c.p_theta);
  return c;
}

}  // namespace

Problem build_problem(const RunConfig& config, const std::filesystem::path& base_dir) {
  const RngStreams streams(config.seed);
  Problem problem;
  const DataSpec& data = config.p_data;
  if (config.domain.kind == DomainKind::kSequence) {
    const DataSource source = data.source.value_or(DataSource::kRandom);
    DimensionCase c;
    c.domain = make_domain(config.domain.categories);
    switch (source) {
      case DataSource::kUniform:
        c.p_data = std::make_shared<const TabularJoint>(TabularJoint::uniform(c.domain));
        break;
      case DataSource::kRandom: {
        SplitMix64 rng = streams.stream(StreamPurpose::kTable);
        c.p_data = std::make_shared<const TabularJoint>(
            random_joint(c.domain, data.concentration, rng));
        break;
      }
      case DataSource::kTable:
        c.p_data = load_table(data.table, data.path, base_dir, c.domain);
        break;
      case DataSource::kFit: {
        std::vector<MaskedSample> dataset;
        for (const json& line : read_json_lines(resolve(base_dir, data.path))) {
          const json& values = line.is_object() ? line.at("values") : line;
          dataset.emplace_back(c.domain, values.get<std::vector<int>>());
          if (!dataset.back().is_complete()) {
            throw ContractViolation("fit: sample lines must be fully assigned");
          }
        }
        c.p_data = std::make_shared<const TabularJoint>(
            fit_tabular(c.domain, dataset, data.smoothing));
        break;
      }
      case DataSource::kValidityRejection:
        throw ContractViolation("validity_rejection needs a graph domain");
    }
    JointPtr p_theta;
    if (!config.perturbation.table.is_null()) {
      p_theta = load_table(config.perturbation.table, "", base_dir, c.domain);
    }
    problem.cases.push_back(finish_case(config, std::move(c), std::move(p_theta)));
    problem.case_probs = {1.0};
    return problem;
  }

  problem.is_graph = true;
  const int node_cats = config.domain.node_categories;
  const int edge_cats = config.domain.edge_categories;
  const DataSource source = data.source.value_or(DataSource::kValidityRejection);
  std::map<std::size_t, std::vector<MaskedSample>> by_nodes;
  std::map<std::size_t, GraphLayout> layouts;
  auto layout_for = [&](std::size_t n) -> const GraphLayout& {
    auto it = layouts.find(n);
    if (it == layouts.end()) it = layouts.emplace(n, GraphLayout(n, node_cats, edge_cats)).first;
    return it->second;
  };
  std::vector<std::size_t> weights_support;
  std::vector<double> weights;
  for (const auto& [n, w] : data.node_count_weights) {
    weights_support.push_back(n);
    weights.push_back(w);
  }
  const Categorical node_weights = Categorical::from_masses(weights);

  DimensionDistribution dims = DimensionDistribution(weights_support, std::vector<double>(
                                                                          node_weights.probs().begin(),
                                                                          node_weights.probs().end()));
  if (source == DataSource::kValidityRejection) {
    SplitMix64 rng = streams.stream(StreamPurpose::kDataset);
    std::vector<std::size_t> counts;
    counts.reserve(data.dataset_size);
    for (std::size_t k = 0; k < data.dataset_size; ++k) {
      const std::size_t n = weights_support[node_weights.sample(rng.uniform01())];
      by_nodes[n].push_back(sample_valid_graph(layout_for(n), rng));
      counts.push_back(n);
    }
    dims = DimensionDistribution::from_node_counts(counts);
  } else if (source == DataSource::kFit) {
    std::vector<std::size_t> counts;
    for (const json& line : read_json_lines(resolve(base_dir, data.path))) {
      const auto n = line.at("n").get<std::size_t>();
      const GraphLayout& layout = layout_for(n);
      if (layout.domain()->state_count() > kDefaultStateLimit) {
        throw ContractViolation("fit: graph with " + std::to_string(n) +
                                " nodes exceeds the tabular state limit");
      }
      by_nodes[n].push_back(graph_from_json(line, layout));
      counts.push_back(n);
    }
    dims = DimensionDistribution::from_node_counts(counts);
  }

  for (std::size_t k = 0; k < dims.support().size(); ++k) {
    const std::size_t n = dims.support()[k];
    DimensionCase c;
    c.nodes = n;
    c.layout = layout_for(n);
    c.domain = c.layout->domain();
    switch (source) {
      case DataSource::kUniform:
        c.p_data = std::make_shared<const TabularJoint>(TabularJoint::uniform(c.domain));
        break;
      case DataSource::kRandom: {
        SplitMix64 rng = streams.stream(StreamPurpose::kTable, n);
        c.p_data = std::make_shared<const TabularJoint>(
            random_joint(c.domain, data.concentration, rng));
        break;
      }
      case DataSource::kFit:
      case DataSource::kValidityRejection:
        c.p_data = std::make_shared<const TabularJoint>(
            fit_tabular(c.domain, by_nodes[n], data.smoothing));
        break;
      case DataSource::kTable:
        throw ContractViolation("table source needs a sequence domain");
    }
    problem.cases.push_back(finish_case(config, std::move(c), nullptr));
    problem.case_probs.push_back(dims.probs()[k]);
  }
  return problem;
}

}  // namespace gardm
