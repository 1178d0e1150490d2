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

// guided_ardm: run, verify, fit and sample from a single JSON config.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gardm/config.hpp"
#include "gardm/error.hpp"
#include "gardm/eval.hpp"
#include "gardm/graphs.hpp"
#include "gardm/verify.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Loaded {
  gardm::RunConfig config;
  fs::path base_dir;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

Loaded load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(path + ": error: cannot open config");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ":" + std::to_string(line_of_offset(text, e.byte)) +
                     ": error: invalid JSON: " + e.what());
  }
  try {
    return {gardm::config_from_json(doc), fs::path(path).parent_path()};
  } catch (const gardm::ConfigError& e) {
    throw UsageError(path + ":" + std::to_string(gardm::locate_line(text, e.pointer())) +
                     ": error: " + e.what());
  }
}

gardm::Problem make_problem(const Loaded& loaded, const std::string& config_path) {
  try {
    return gardm::build_problem(loaded.config, loaded.base_dir);
  } catch (const gardm::ContractViolation& e) {
    throw UsageError(config_path + ": error: " + e.what());
  } catch (const json::exception& e) {
    throw UsageError(config_path + ": error: " + e.what());
  }
}

// Writes to a hidden temp file in the same directory, then renames over the target.
void write_atomic(const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path target = dir / name;
  const fs::path temp = dir / ("." + name + ".tmp");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + temp.string());
  }
  fs::rename(temp, target);
}

fs::path output_dir(const Loaded& loaded, const std::string& flag) {
  std::string dir = flag.empty() ? loaded.config.output_dir : flag;
  if (dir.empty()) throw UsageError("error: no output directory (set output_dir or pass --out)");
  fs::path p(dir);
  if (flag.empty() && p.is_relative()) p = loaded.base_dir / p;
  fs::create_directories(p);
  return p;
}

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag) return std::max<std::size_t>(1, *flag);
  if (const char* env = std::getenv("GUIDED_ARDM_THREADS")) {
    try {
      return std::max<std::size_t>(1, std::stoul(env));
    } catch (const std::exception&) {
      throw UsageError("error: GUIDED_ARDM_THREADS must be a positive integer");
    }
  }
  return 1;
}

void write_distributions(const fs::path& dir, const gardm::Problem& problem) {
  for (const gardm::DimensionCase& c : problem.cases) {
    const std::string suffix = problem.is_graph ? "_n" + std::to_string(c.nodes) : "";
    write_atomic(dir, "p_data" + suffix + ".json", gardm::to_json(*c.p_data).dump() + "\n");
    write_atomic(dir, "p_theta" + suffix + ".json", gardm::to_json(*c.p_theta).dump() + "\n");
  }
}

json sample_line(const gardm::Problem& problem, const gardm::GeneratedSample& g) {
  json line = {{"values", g.sample.values()},
               {"order", g.order.perm()},
               {"model_evals", g.counters.model_evals},
               {"disc_evals", g.counters.disc_evals}};
  const gardm::DimensionCase& c = problem.cases[g.case_index];
  if (c.layout) {
    line["graph"] = gardm::graph_to_json(g.sample, *c.layout);
    line["valid"] = gardm::graph_validity(g.sample, *c.layout).valid;
  }
  return line;
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, Common& c, bool with_out) {
  cmd->add_option("--config", c.config, "JSON run config")->required();
  if (with_out) cmd->add_option("--out", c.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", c.seed, "root seed (overrides config)");
  cmd->add_option("--threads", c.threads, "worker threads (env GUIDED_ARDM_THREADS)");
}

Loaded load_with_overrides(const Common& c) {
  Loaded loaded = load_config(c.config);
  if (c.seed) loaded.config.seed = *c.seed;
  return loaded;
}

int cmd_run(const Common& c) {
  const Loaded loaded = load_with_overrides(c);
  const std::size_t threads = resolve_threads(c.threads);
  const gardm::Problem problem = make_problem(loaded, c.config);
  const fs::path dir = output_dir(loaded, c.out);
  const gardm::RunReport report = gardm::run_experiment(loaded.config, problem, threads);
  write_distributions(dir, problem);
  write_atomic(dir, "report.json", gardm::to_json(report, true).dump(2) + "\n");
  write_atomic(dir, "report.csv", gardm::to_csv(report));
  for (const gardm::CellReport& cell : report.cells) {
    std::cout << gardm::to_string(cell.method) << " " << gardm::to_string(cell.order)
              << " N=" << cell.particles << ": ";
    if (!cell.ok) {
      std::cout << "FAILED " << cell.error << "\n";
      continue;
    }
    for (const auto& [name, m] : cell.metrics) std::cout << name << "=" << m.value << " ";
    std::cout << "evals=" << cell.counters.total() << "\n";
  }
  std::cout << "wrote " << (dir / "report.json").string() << "\n";
  return report.all_ok() ? 0 : kExitFailure;
}

int cmd_verify(const Common& c) {
  const Loaded loaded = load_with_overrides(c);
  const gardm::Problem problem = make_problem(loaded, c.config);
  try {
    const gardm::VerifyReport report = gardm::verify_problem(problem, loaded.config.seed);
    std::cout << report.render();
    return report.all_passed() ? 0 : kExitFailure;
  } catch (const gardm::OracleCapExceeded& e) {
    std::cerr << c.config << ": error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_fit(const Common& c, const std::string& samples, double smoothing) {
  Loaded loaded = load_with_overrides(c);
  loaded.config.p_data.source = gardm::DataSource::kFit;
  loaded.config.p_data.path = fs::absolute(samples).string();
  loaded.config.p_data.smoothing = smoothing;
  const gardm::Problem problem = make_problem(loaded, c.config);
  const fs::path dir = output_dir(loaded, c.out);
  for (const gardm::DimensionCase& dc : problem.cases) {
    const std::string suffix = problem.is_graph ? "_n" + std::to_string(dc.nodes) : "";
    write_atomic(dir, "p_data" + suffix + ".json", gardm::to_json(*dc.p_data).dump() + "\n");
  }
  std::cout << "fitted " << problem.cases.size() << " table(s) into " << dir.string() << "\n";
  return 0;
}

int cmd_sample(const Common& c, const std::string& method_name, const std::string& order_name,
               std::optional<std::size_t> count) {
  const Loaded loaded = load_with_overrides(c);
  const auto method = gardm::parse_method(method_name);
  if (!method) throw UsageError("error: unknown method '" + method_name + "'");
  const auto order = gardm::parse_order_kind(order_name);
  if (!order) throw UsageError("error: unknown order '" + order_name + "'");
  const gardm::Problem problem = make_problem(loaded, c.config);
  const gardm::RunConfig& cfg = loaded.config;
  const std::size_t m = count.value_or(cfg.samples);
  const std::size_t particles = gardm::is_smc(*method) ? cfg.particles : 1;
  std::ostringstream lines;
  for (std::size_t k = 0; k < m; ++k) {
    try {
      const gardm::GeneratedSample g =
          gardm::generate_one(problem, *method, *order, particles, cfg.ess_threshold, false,
                              gardm::sample_seed(cfg.seed, *order, k));
      lines << sample_line(problem, g).dump() << "\n";
    } catch (const gardm::GuidanceError& e) {
      std::cerr << "sample " << k << ": " << e.what() << "\n";
      return kExitFailure;
    }
  }
  if (c.out.empty() && cfg.output_dir.empty()) {
    std::cout << lines.str();
    return 0;
  }
  const fs::path dir = output_dir(loaded, c.out);
  const std::string name = "samples_" + method_name + "_" + order_name + ".jsonl";
  write_atomic(dir, name, lines.str());
  std::cout << "wrote " << (dir / name).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discriminator-guided order-agnostic ARDM sampling on tabular distributions"};
  app.require_subcommand(1);

  Common run_opts, verify_opts, fit_opts, sample_opts;
  CLI::App* run = app.add_subcommand("run", "run every (method, order) cell and write reports");
  add_common(run, run_opts, true);

  CLI::App* verify = app.add_subcommand("verify", "exhaustive oracle checks");
  add_common(verify, verify_opts, false);

  CLI::App* fit = app.add_subcommand("fit", "fit p_data from a JSON-lines sample file");
  add_common(fit, fit_opts, true);
  std::string fit_samples;
  double fit_smoothing = 1.0;
  fit->add_option("--samples", fit_samples, "JSON-lines sample file")->required();
  fit->add_option("--smoothing", fit_smoothing, "additive smoothing")->check(
      CLI::NonNegativeNumber);

  CLI::App* sample = app.add_subcommand("sample", "emit raw samples as JSON lines");
  add_common(sample, sample_opts, true);
  std::string sample_method = "ARDG";
  std::string sample_order = "uniform";
  std::optional<std::size_t> sample_count;
  sample->add_option("--method", sample_method, "ARDM | ARDG | BSDG | FADG");
  sample->add_option("--order", sample_order, "uniform | NsEs | NEsN");
  sample->add_option("--count", sample_count, "number of samples (default: config samples)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*verify) return cmd_verify(verify_opts);
    if (*fit) return cmd_fit(fit_opts, fit_samples, fit_smoothing);
    if (*sample) return cmd_sample(sample_opts, sample_method, sample_order, sample_count);
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
