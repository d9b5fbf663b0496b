// gamow-lab: reproducible resonance / Hardy-space experiments from a JSON
// config. Exit codes: 0 ok, 2 bad config or input, 3 numerical contract
// violated, 1 anything else.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamowlab/gamowlab.hpp"

namespace {

struct Overrides {
  std::string config;
  std::vector<double> t;
  std::string direction;
  bool diagnostic = false;
  std::string output;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::string input;
};

void add_options(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON experiment config")->required();
  sub->add_option("--t", o.t, "time point (repeatable), replaces config times");
  sub->add_option("--direction", o.direction, "schrodinger_state | heisenberg_observable");
  sub->add_flag("--diagnostic", o.diagnostic, "allow t < 0 (semigroup check off)");
  sub->add_option("-o,--output", o.output, "output file (default stdout)");
  sub->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", o.seed, "RNG seed for synthetic fits");
  sub->add_option("--input", o.input, "E,sigma CSV for fit-pole");
}

gamowlab::RunConfig resolve(const Overrides& o, std::optional<gamowlab::Experiment> e) {
  auto c = gamowlab::load_config(o.config, e);
  if (!o.t.empty()) c.times = o.t;
  if (!o.direction.empty()) c.direction = gamowlab::parse_direction(o.direction, "--direction");
  if (o.diagnostic) c.diagnostic = true;
  if (!o.output.empty()) c.io.output_path = o.output;
  if (!o.format.empty()) c.io.format = o.format;
  if (o.seed) c.seed = *o.seed;
  if (!o.input.empty()) c.io.input_csv = o.input;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using gamowlab::Experiment;
  CLI::App app{"gamow-lab: Gamow states, Hardy spaces and resonance poles"};
  app.require_subcommand(1);

  Overrides o;
  std::optional<Experiment> chosen;
  const std::pair<const char*, std::optional<Experiment>> subs[] = {
      {"run", std::nullopt},
      {"decompose", Experiment::decompose},
      {"evolve", Experiment::evolve},
      {"decay-curve", Experiment::decay_curve},
      {"fit-pole", Experiment::fit_pole},
      {"smatrix-decompose", Experiment::smatrix_decompose},
  };
  const char* help[] = {
      "run the experiment named in the config",
      "split a wave function into H2+ and H2- parts and report leakage",
      "evolve a wave function and report Hardy leakage and norm per t",
      "survival amplitude of a Gamow state",
      "fit E_R and Gamma to a Breit-Wigner line shape",
      "pole term + background split of an S-matrix element",
  };
  int idx = 0;
  for (const auto& [name, exp] : subs) {
    auto* sub = app.add_subcommand(name, help[idx++]);
    add_options(sub, o);
    sub->callback([&chosen, e = exp] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto level = gamowlab::log_level_from_env();
  try {
    const auto config = resolve(o, chosen);
    if (level == gamowlab::LogLevel::debug)
      std::cerr << "gamow-lab: experiment=" << gamowlab::to_string(config.experiment)
                << " diagnostic=" << (config.diagnostic ? "true" : "false")
                << " seed=" << config.seed << '\n';
    const auto outcome = gamowlab::run(config, std::cout);
    if (level != gamowlab::LogLevel::quiet) {
      // Keep stdout clean when it carries the data.
      auto& log = config.io.output_path.empty() ? std::cerr : std::cout;
      log << outcome.summary << '\n';
    }
    return outcome.exit_code;
  } catch (const gamowlab::fit_error& e) {
    std::cerr << "gamow-lab: " << e.what() << " (best E_R=" << e.best().params.E_R
              << " Gamma=" << e.best().params.Gamma << ")\n";
    return 3;
  } catch (const gamowlab::error& e) {
    std::cerr << "gamow-lab: " << e.what() << '\n';
    return gamowlab::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "gamow-lab: " << e.what() << '\n';
    return 1;
  }
}
