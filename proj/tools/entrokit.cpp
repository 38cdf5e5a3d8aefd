// entrokit command-line front end: validate, run and normalize scenarios.

#include "entrokit/equilibrium.hpp"
#include "entrokit/errors.hpp"
#include "entrokit/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

enum Exit : int
{
  ok = 0,
  other = 1,
  parse = 2,
  integrity = 3,
  domain = 4,
  nonconvergence = 5,
};

template <class F>
int guarded(F&& body)
{
  using namespace entrokit;
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return parse;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return integrity;
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return nonconvergence;
  } catch (const Error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return domain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return domain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return other;
  }
}

} // namespace

int main(int argc, char** argv)
{
  namespace sc = entrokit::scenario;
  CLI::App app{"entrokit: operational entropy, equilibria and open-system bookkeeping"};
  app.require_subcommand(1);

  std::string scenario_path;

  auto* validate = app.add_subcommand("validate", "check schema, references, elemental sets and model domains");
  validate->add_option("--scenario", scenario_path, "scenario file")->required();

  sc::RunOptions ro;
  std::uint64_t seed = 0;
  std::string units;
  auto* run = app.add_subcommand("run", "run computations and write CSV tables");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", ro.out_dir, "output directory (overrides the scenario)");
  auto* seed_opt = run->add_option("--seed", seed, "random seed (overrides the scenario)");
  run->add_option("--units", units, "unit system")->check(CLI::IsMember({"reduced", "si"}));
  run->add_option("--measure-entropy", ro.measure_entropy, "entropy measurement to run")->take_all();
  run->add_option("--run-process", ro.run_process, "process to run")->take_all();
  run->add_option("--equilibrate", ro.equilibrate, "equilibrium problem to solve")->take_all();
  run->add_option("--open-table", ro.open_table, "open-system relation to tabulate")->take_all();
  run->add_option("--decorrelate", ro.decorrelate, "joint state to analyse")->take_all();
  run->add_option("--temperature-ratio", ro.temperature_ratio, "temperature measurement to run")->take_all();
  run->add_option("--bound", ro.bound, "reservoir-energy bound to search")->take_all();
  run->add_flag("--open-states", ro.open_states, "evaluate declared open states");
  run->add_flag("--theorem-suite", ro.theorem_suite, "run the invariant suites");
  run->add_option("--suite-cases", ro.suite_cases, "random cases per invariant suite");
  run->add_flag("--all", ro.all, "run everything declared in the scenario");

  std::string normalized;
  auto* normalize = app.add_subcommand("normalize", "print the scenario in canonical form");
  normalize->add_option("--scenario", scenario_path, "scenario file")->required();
  normalize->add_option("--output", normalized, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : parse;
  }

  if (*validate)
    return guarded([&] {
      const auto rep = sc::validate(sc::load(scenario_path));
      for (const auto& line : rep.lines)
        std::cout << line << '\n';
      std::cout << "ok\n";
      return ok;
    });

  if (*normalize)
    return guarded([&] {
      const auto text = sc::serialize(sc::load(scenario_path));
      if (normalized.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(normalized, std::ios::binary);
        if (!out)
          throw std::runtime_error("cannot write '" + normalized + "'");
        out << text;
      }
      return ok;
    });

  return guarded([&] {
    const auto s = sc::load(scenario_path);
    sc::validate(s);
    if (*seed_opt)
      ro.seed = seed;
    if (!units.empty())
      ro.units = units;
    for (const auto& path : sc::run(s, ro))
      std::cout << path << '\n';
    return ok;
  });
}
