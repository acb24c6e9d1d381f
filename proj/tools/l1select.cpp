// l1select: choose a density estimate from a finite candidate family.
//
//   l1select select --family F.json --empirical H.json --algorithm efficient
//   l1select verify --trials 10000 --seed 1
//   l1select bench  --sizes 1,2,4,8 --omega 6 --out bench.csv
//   l1select gen    --example nine --eps 0.001 --out dir/

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "l1select/commands.hpp"

int main(int argc, char** argv) {
  using namespace l1select;

  CLI::App app{"Density selection under L1 error with inner-product cost accounting"};
  app.require_subcommand(1);

  cli::SelectOptions select;
  auto* sel = app.add_subcommand("select", "Run one selector and print its report as JSON");
  sel->add_option("--family", select.family_path, "Family file (JSON)")->required();
  sel->add_option("--empirical", select.empirical_path, "Empirical distribution file (JSON)")->required();
  sel->add_option("--algorithm", select.algorithm, "tournament|mindist|modified|minloss|efficient|randomized")
      ->capture_default_str();
  sel->add_option("--seed", select.seed, "Seed for the randomized selector")->capture_default_str();

  cli::VerifyOptions verify;
  std::string delta_mode = "full";
  bool inject_fault = false;
  auto* ver = app.add_subcommand("verify", "Check every guarantee on random and table instances");
  ver->add_option("--trials", verify.trials)->capture_default_str();
  ver->add_option("--max-omega", verify.max_omega, "Largest support size")->capture_default_str();
  ver->add_option("--max-family", verify.max_family, "Largest family size")->capture_default_str();
  ver->add_option("--seed", verify.seed)->capture_default_str();
  ver->add_option("--delta-mode", delta_mode, "full|restricted")->check(CLI::IsMember({"full", "restricted"}));
  ver->add_option("--dump", verify.dump_path, "Where to write a counterexample")->capture_default_str();
  // Self-test: on a draw, the elimination selector removes the first member instead.
  ver->add_flag("--inject-draw-fault", inject_fault)->group("");

  cli::BenchOptions bench;
  auto* ben = app.add_subcommand("bench", "Ledger counts and wall time per family size, as CSV");
  ben->add_option("--sizes", bench.sizes, "Comma-separated family sizes")->delimiter(',');
  ben->add_option("--omega", bench.omega, "Support size")->capture_default_str();
  ben->add_option("--seed", bench.seed)->capture_default_str();
  ben->add_option("--out", bench.out_path, "CSV path (default stdout)");

  cli::GenOptions gen;
  auto* gn = app.add_subcommand("gen", "Write a generated instance as JSON files");
  gn->add_option("--example", gen.example, "three|nine|vcdim|random")->required();
  gn->add_option("--eps", gen.eps)->capture_default_str();
  gn->add_option("--n", gen.n, "Bits for the vcdim family")->capture_default_str();
  gn->add_option("--seed", gen.seed)->capture_default_str();
  gn->add_option("--omega", gen.omega, "Support size (random)")->capture_default_str();
  gn->add_option("--family-size", gen.family_size, "Candidates (random)")->capture_default_str();
  gn->add_option("--noise", gen.noise, "Empirical noise (random)")->capture_default_str();
  gn->add_option("--out", gen.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitInvalid;
  }

  if (*sel) return cli::run_select(select, std::cout, std::cerr);
  if (*ver) {
    verify.delta_mode = delta_mode == "restricted" ? oracle::DeltaMode::Restricted : oracle::DeltaMode::Full;
    if (inject_fault) verify.draws = DrawPolicy::RemoveFirst;
    return cli::run_verify(verify, std::cout, std::cerr);
  }
  if (*ben) return cli::run_bench(bench, std::cout, std::cerr);
  return cli::run_gen(gen, std::cout, std::cerr);
}
