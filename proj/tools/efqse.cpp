// Command-line front end: casci, forge, qse, compare, report, and run (all
// stages in sequence).

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "efqse/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string mode;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::string output;
  int threads = -1;
  bool has_shots = false;
  bool has_seed = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--mode", o.mode, "exact, sampled or noisy");
  sub->add_option_function<std::uint64_t>("--shots", [&o](std::uint64_t v) { o.shots = v; o.has_shots = true; },
                                          "Shots per circuit and setting");
  sub->add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t v) { o.seed = v; o.has_seed = true; },
                                          "Master seed");
  sub->add_option("--output", o.output, "Output directory");
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

efqse::RunConfig resolve(const Overrides& o) {
  efqse::RunConfig c = efqse::read_run_config(o.config);
  if (!o.mode.empty()) {
    try {
      c.mode = efqse::parse_mode(o.mode);
    } catch (const efqse::Error& e) {
      throw efqse::ConfigError(e.what());
    }
  }
  if (o.has_shots) c.shots = o.shots;
  if (o.has_seed) c.seed = o.seed;
  if (!o.output.empty()) c.output_dir = o.output;
  if (o.threads >= 0) c.threads = o.threads;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement forging with subspace expansion for excited states"};
  app.require_subcommand(1);
  Overrides o;
  auto* casci = app.add_subcommand("casci", "Exact active-space spectrum");
  auto* forge = app.add_subcommand("forge", "Optimize the forged ground state");
  auto* qse = app.add_subcommand("qse", "Excited states by subspace expansion");
  auto* compare = app.add_subcommand("compare", "Deviation summary between spectra");
  auto* report = app.add_subcommand("report", "Excitation-energy table");
  auto* run = app.add_subcommand("run", "All stages");
  for (auto* s : {casci, forge, qse, compare, report, run}) add_common(s, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const efqse::RunConfig c = resolve(o);
    if (casci->parsed()) {
      efqse::stage_casci(c);
    } else if (forge->parsed()) {
      efqse::stage_forge(c);
    } else if (qse->parsed()) {
      efqse::stage_qse(c);
    } else if (compare->parsed()) {
      efqse::stage_compare(c);
    } else if (report->parsed()) {
      std::cout << efqse::stage_report(c);
    } else {
      const auto art = efqse::run_pipeline(c);
      std::cout << efqse::comparison_csv(art.comparison);
    }
  } catch (const efqse::StageError& e) {
    std::cerr << "efqse: stage " << e.what() << "\n";
    return e.exit_code();
  } catch (const efqse::ConfigError& e) {
    std::cerr << "efqse: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const efqse::ParseError& e) {
    std::cerr << "efqse: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "efqse: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
