// fixpt: run one scenario and write its report and traces.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fixpt/cli/run.hpp"
#include "fixpt/exactreal/json.hpp"

namespace {

using fixpt::SpecError;
using fixpt::cli::ScenarioSpec;

struct Flags {
  std::string spec_path;
  std::optional<std::string> out;
  std::optional<std::int64_t> steps;
  std::optional<int> precision;
  std::optional<std::int64_t> stage_budget;
  std::optional<std::uint64_t> seed;
  // demo only
  std::string demo;
  std::optional<std::int64_t> delay, rate_prefix, index, pairs, coordinates;
  std::optional<std::string> sequence;
};

int report_errors(const std::vector<SpecError>& errors, const Flags& f) {
  for (const auto& e : errors) std::cerr << "spec error: " << e.what() << "\n";
  if (f.out) {
    try {
      fixpt::cli::write_artifacts(fixpt::cli::spec_error_result(errors), *f.out);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
    }
  }
  return fixpt::cli::exit_spec_error;
}

std::vector<fixpt::exactreal::Dyadic> parse_sequence(const std::string& text) {
  std::vector<fixpt::exactreal::Dyadic> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      values.push_back(nlohmann::json::parse(item).get<fixpt::exactreal::Dyadic>());
    } catch (const std::exception&) {
      values.push_back(fixpt::exactreal::Dyadic::parse(item));
    }
  }
  return values;
}

int run(const std::string& action, const Flags& f) {
  ScenarioSpec spec;
  if (!f.spec_path.empty()) {
    std::ifstream in(f.spec_path);
    if (!in) return report_errors({SpecError("(document)", "cannot read " + f.spec_path)}, f);
    std::stringstream text;
    text << in.rdbuf();
    auto parsed = fixpt::cli::parse_spec(text.str());
    if (!parsed.ok()) return report_errors(parsed.errors, f);
    spec = *parsed.spec;
  }
  spec.action = action;
  if (f.out) spec.out = *f.out;
  if (f.steps) spec.iterate.steps = *f.steps;
  if (f.precision) {
    spec.iterate.precision = *f.precision;
    spec.report_precision = *f.precision;
  }
  if (f.stage_budget) spec.enumerate.stage_budget = *f.stage_budget;
  if (f.seed) spec.seed = *f.seed;
  if (action == "demo") {
    spec.demo.name = f.demo;
    if (f.delay) spec.demo.delay = *f.delay;
    if (f.rate_prefix) spec.demo.rate_prefix = *f.rate_prefix;
    if (f.index) spec.demo.index = *f.index;
    if (f.pairs) spec.demo.pairs = *f.pairs;
    if (f.coordinates) spec.demo.coordinates = *f.coordinates;
    try {
      if (f.sequence) spec.demo.sequence = parse_sequence(*f.sequence);
    } catch (const fixpt::Error& e) {
      return report_errors({SpecError("--sequence", e.what())}, f);
    }
  }
  // flags go through the same validation as files
  auto checked = fixpt::cli::parse_spec(fixpt::cli::to_json(spec));
  if (!checked.ok()) return report_errors(checked.errors, f);

  const auto result = fixpt::cli::run_scenario(*checked.spec);
  try {
    fixpt::cli::write_artifacts(result, checked.spec->out);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return fixpt::cli::exit_spec_error;
  }
  std::cout << result.report.dump(2) << "\n";
  return result.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed point synthesis, iteration and certification scenarios"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub, bool spec_required) {
    auto* opt = sub->add_option("--spec", f.spec_path, "scenario JSON file");
    if (spec_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory (default: from the scenario, else ./out)");
    sub->add_option("--steps", f.steps, "iteration steps");
    sub->add_option("--precision", f.precision, "working / report precision in bits");
    sub->add_option("--stage-budget", f.stage_budget, "enumerator stage budget");
    sub->add_option("--seed", f.seed, "seed for sampled points");
  };

  std::string chosen;
  for (const char* name : {"synth", "iterate", "enumerate-halfspaces", "metastable", "certify-rate"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " action of a scenario");
    common(sub, true);
    sub->callback([&chosen, name] { chosen = name; });
  }
  auto* demo = app.add_subcommand("demo", "built-in demonstrations");
  common(demo, false);
  demo->add_option("name", f.demo, "specker | cube | pseudo | tmap")
      ->required()
      ->check(CLI::IsMember({"specker", "cube", "pseudo", "tmap"}));
  demo->add_option("--delay", f.delay, "specker: stage at which the enumeration fires");
  demo->add_option("--rate-prefix", f.rate_prefix, "specker: stages used to certify a rate");
  demo->add_option("--index", f.index, "specker: index that fires");
  demo->add_option("--pairs", f.pairs, "pseudo: random pairs checked");
  demo->add_option("--coordinates", f.coordinates, "tmap: coordinates reported");
  demo->add_option("--sequence", f.sequence, "tmap: comma-separated nondecreasing values, last one repeats");
  demo->callback([&chosen] { chosen = "demo"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fixpt::cli::exit_spec_error;
  }
  try {
    return run(chosen, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
