#pragma once

// Command implementations behind the l1select CLI. Each returns the process
// exit code: 0 success, 1 verification failure, 2 parse error, 3 invalid
// parameters.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "l1select/density.hpp"
#include "l1select/generators.hpp"
#include "l1select/io.hpp"
#include "l1select/oracle.hpp"
#include "l1select/rng.hpp"
#include "l1select/selectors.hpp"

namespace l1select::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInvalid = 3;

using io::json;

// ---------------------------------------------------------------- select

struct SelectOptions {
  std::string family_path;
  std::string empirical_path;
  std::string algorithm = "efficient";
  std::uint64_t seed = 0;
};

inline int run_select(const SelectOptions& opt, std::ostream& out, std::ostream& err) {
  const auto algorithm = parse_algorithm(opt.algorithm);
  if (!algorithm) {
    err << "unknown algorithm '" << opt.algorithm << "'\n";
    return kExitInvalid;
  }
  Family family;
  EmpiricalDistribution h;
  try {
    family = io::family_from_json(io::read_json_file(opt.family_path));
    h = io::empirical_from_json(io::read_json_file(opt.empirical_path), family.support());
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitParse;
  }
  try {
    if (family.empty()) throw Error(ErrorCode::EmptyFamily, "family file has no candidates");
    const PreprocessedFamily prep(family);
    Ledger ledger;
    const auto report = run_algorithm(*algorithm, prep, h, ledger, opt.seed);
    out << io::report_to_json(report).dump(2) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitInvalid;
  }
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::uint64_t trials = 10000;
  std::size_t max_omega = 6;
  std::size_t max_family = 8;
  std::uint64_t seed = 1;
  oracle::DeltaMode delta_mode = oracle::DeltaMode::Full;
  DrawPolicy draws = DrawPolicy::RemoveSecond;  // RemoveFirst is the injected fault
  std::string dump_path = "counterexample.json";
};

/// Closed-form ledger counts for a family of size m.
struct ExpectedCost {
  std::uint64_t h_products = 0;
  std::uint64_t term_evaluations = 0;
};

inline ExpectedCost expected_cost(Algorithm a, std::uint64_t m) {
  const std::uint64_t pairs = m < 2 ? 0 : m * (m - 1) / 2;
  switch (a) {
    case Algorithm::Tournament: return {pairs, 0};
    case Algorithm::MinDistance: return {0, m * m * (m - 1)};
    case Algorithm::ModifiedMinDistance: return {0, m * (m - 1)};
    case Algorithm::MinLossWeight: return {pairs, 0};
    case Algorithm::EfficientMinLossWeight: return {m == 0 ? 0 : m - 1, 0};
    case Algorithm::Randomized: return {1, 0};
  }
  return {};
}

struct Tally {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  double min_margin = std::numeric_limits<double>::infinity();

  void add(bool pass, double margin) {
    ++checked;
    if (!pass) ++failures;
    min_margin = std::min(min_margin, margin);
  }

  json to_json() const {
    json j{{"checked", checked}, {"failures", failures}};
    j["min_margin"] = checked == 0 ? json(nullptr) : io::number_or_tag(min_margin);
    return j;
  }
};

/// Accumulates every check over a verification sweep.
class VerifySuite {
 public:
  explicit VerifySuite(const VerifyOptions& opt) : opt_(opt) {}

  void audit(const Instance& inst, Rng& rng) {
    const Family& fam = inst.family;
    const auto& g = inst.truth;
    const auto& h = inst.empirical;
    const PreprocessedFamily prep(fam);
    const std::uint64_t m = fam.size();

    for (Algorithm a : {Algorithm::Tournament, Algorithm::MinDistance, Algorithm::ModifiedMinDistance,
                        Algorithm::MinLossWeight, Algorithm::EfficientMinLossWeight}) {
      Ledger ledger;
      const auto r = run_algorithm(a, prep, h, ledger, 0, opt_.draws);
      const auto want = expected_cost(a, m);
      const bool cost_ok = r.h_products == want.h_products && r.term_evaluations == want.term_evaluations;
      costs_.add(cost_ok, 0.0);
      if (!cost_ok) fail(inst, "cost formula for " + std::string(algorithm_name(a)));

      const bool is_tournament = a == Algorithm::Tournament;
      const auto full = oracle::check_bound(r.selected, fam, g, h.mass(), is_tournament ? 9 : 3, is_tournament ? 8 : 2);
      record(bound_key(a, "full"), full, inst);
      const bool restricted_claim = a == Algorithm::ModifiedMinDistance || a == Algorithm::MinLossWeight ||
                                    a == Algorithm::EfficientMinLossWeight;
      if (opt_.delta_mode == oracle::DeltaMode::Restricted && restricted_claim) {
        record(bound_key(a, "restricted"),
               oracle::check_bound(r.selected, fam, g, h.mass(), 3, 2, oracle::DeltaMode::Restricted), inst);
      }

      if (a == Algorithm::EfficientMinLossWeight) {
        const bool strict = oracle::check_4b_invariant(fam, h.mass(), r.selected, 1.0, LossReading::StrictLoss);
        const bool inclusive = oracle::check_4b_invariant(fam, h.mass(), r.selected, 1.0, LossReading::NotWinning);
        invariant_4b_.add(strict, strict ? 0.0 : -1.0);
        if (!strict) fail(inst, "efficient selector output condition (strict loss)");
        if (strict != inclusive) ++reading_disagreements_;
        for (const auto& e : r.trace) {
          if (e.outcome == Outcome::Draw) ++draws_in_4b_;
        }
      }
    }

    if (m == 2 && l1_distance(fam.mass(0), fam.mass(1)) > 0.0) {
      Ledger ledger;
      const auto r = randomized_two(fam, h, 0, ledger);
      const std::vector<double> w{r.mixture->first, r.mixture->second};
      record("randomized_2_1_full", oracle::check_mixture_bound(w, fam, g, h.mass(), 2, 1), inst);
      const bool mix_ok = std::abs(w[0] + w[1] - 1.0) <= 1e-12 && w[0] >= 0.0 && w[1] >= 0.0;
      costs_.add(mix_ok && r.h_products == 1, 0.0);
      if (!mix_ok) fail(inst, "mixture weights");
    }

    // Win-rule equivalence holds when h and the candidates agree on the atoms
    // where the candidates tie; other pairs are counted as skipped.
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        double fz = 0.0, hz = 0.0;
        for (std::size_t x = 0; x < fam.support().size(); ++x) {
          if (fam.mass(i)[x] == fam.mass(j)[x]) {
            fz += fam.mass(i)[x];
            hz += h.mass()[x];
          }
        }
        if (std::abs(fz - hz) > oracle::kIdentitySlack) {
          ++equivalence_skipped_;
          continue;
        }
        const auto w = oracle::check_win_equivalence(fam.mass(i), fam.mass(j), h.mass());
        equivalence_.add(w.agree(), w.agree() ? 0.0 : -1.0);
        if (!w.agree()) fail(inst, "win-rule equivalence");
      }
    }

    for (int q = 0; q < 8; ++q) {
      const auto v = oracle::check_quadruple(fam.mass(rng.below(m)), fam.mass(rng.below(m)), fam.mass(rng.below(m)),
                                             fam.mass(rng.below(m)));
      quadruple_.add(v >= -oracle::kIdentitySlack, v);
      if (v < -oracle::kIdentitySlack) fail(inst, "quadruple inequality");
    }
  }

  /// Fixed lower-bound instances with known outcomes.
  void audit_fixed(Rng& rng) {
    const auto three = gen_lower_bound_3(0.01);
    audit(three, rng);
    audit(swap_family(three), rng);
    const auto nine = gen_lower_bound_9(0.001);
    audit(nine, rng);
    Ledger ledger;
    const auto t = scheffe_tournament(PreprocessedFamily(nine.family), nine.empirical, ledger);
    const bool ok = t.selected_name == "f1";
    fixed_.add(ok, 0.0);
    if (!ok) fail(nine, "tournament on the nine-eps table must select f1");
  }

  bool passed() const { return !first_failure_; }

  json summary() const {
    json j;
    j["trials"] = opt_.trials;
    j["seed"] = opt_.seed;
    j["max_omega"] = opt_.max_omega;
    j["max_family"] = opt_.max_family;
    j["delta_mode"] = opt_.delta_mode == oracle::DeltaMode::Full ? "full" : "restricted";
    j["draw_policy"] = opt_.draws == DrawPolicy::RemoveSecond ? "remove-second" : "remove-first";
    j["bounds"] = json::object();
    for (const auto& [k, v] : bounds_) j["bounds"][k] = v.to_json();
    j["costs"] = costs_.to_json();
    j["efficient_output_condition"] = invariant_4b_.to_json();
    j["efficient_draw_comparisons"] = draws_in_4b_;
    j["loss_reading_disagreements"] = reading_disagreements_;
    j["win_equivalence"] = equivalence_.to_json();
    j["win_equivalence"]["skipped_tie_pairs"] = equivalence_skipped_;
    j["quadruple"] = quadruple_.to_json();
    j["fixed_instances"] = fixed_.to_json();
    j["status"] = passed() ? "pass" : "fail";
    if (first_failure_) {
      j["first_failure"] = first_failure_->at("failed_check");
      j["counterexample"] = opt_.dump_path;
    }
    return j;
  }

  const std::optional<json>& counterexample() const { return first_failure_; }

 private:
  static std::string bound_key(Algorithm a, const char* mode) {
    const bool t = a == Algorithm::Tournament;
    return std::string(algorithm_name(a)) + (t ? "_9_8_" : "_3_2_") + mode;
  }

  void record(const std::string& key, const oracle::BoundCheck& c, const Instance& inst) {
    bounds_[key].add(c.pass, c.margin);
    if (!c.pass) fail(inst, "bound " + key);
  }

  void fail(const Instance& inst, const std::string& what) {
    if (first_failure_) return;
    json j;
    j["failed_check"] = what;
    j["label"] = inst.label;
    j["family"] = io::family_to_json(inst.family);
    j["empirical"] = io::empirical_to_json(inst.empirical);
    j["truth"] = inst.truth;
    first_failure_ = std::move(j);
  }

  VerifyOptions opt_;
  std::map<std::string, Tally> bounds_;
  Tally costs_;
  Tally invariant_4b_;
  Tally equivalence_;
  Tally quadruple_;
  Tally fixed_;
  std::uint64_t equivalence_skipped_ = 0;
  std::uint64_t reading_disagreements_ = 0;
  std::uint64_t draws_in_4b_ = 0;
  std::optional<json> first_failure_;
};

inline constexpr double kNoiseLevels[] = {0.0, 0.01, 0.05, 0.2};

inline int run_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.trials < 1 || opt.max_omega < 1 || opt.max_family < 1) {
    err << "trials, max-omega and max-family must be positive\n";
    return kExitInvalid;
  }
  VerifySuite suite(opt);
  Rng rng(opt.seed);
  suite.audit_fixed(rng);
  for (std::uint64_t t = 0; t < opt.trials; ++t) {
    const std::size_t k = 1 + rng.below(opt.max_omega);
    const std::size_t m = 1 + rng.below(opt.max_family);
    const double noise = kNoiseLevels[rng.below(std::size(kNoiseLevels))];
    suite.audit(random_instance(rng.next(), k, m, noise), rng);
  }
  if (!suite.passed()) {
    if (!io::write_json_file(opt.dump_path, *suite.counterexample())) {
      err << "could not write counterexample to '" << opt.dump_path << "'\n";
    }
  }
  out << suite.summary().dump(2) << '\n';
  return suite.passed() ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::vector<std::size_t> sizes{1, 2, 4, 8, 16};
  std::size_t omega = 6;
  std::uint64_t seed = 1;
  std::string out_path;  // empty: stdout
};

struct BenchRow {
  std::size_t family_size = 0;
  Algorithm algorithm = Algorithm::Tournament;
  std::uint64_t h_products = 0;
  std::uint64_t term_evaluations = 0;
  std::int64_t wall_time_ns = 0;
};

inline std::vector<BenchRow> bench_rows(const BenchOptions& opt) {
  std::vector<BenchRow> rows;
  for (std::size_t m : opt.sizes) {
    const auto inst = random_instance(opt.seed + m, opt.omega, m, 0.05);
    const PreprocessedFamily prep(inst.family);
    for (Algorithm a : kAllAlgorithms) {
      if (a == Algorithm::Randomized && (m != 2 || l1_distance(inst.family.mass(0), inst.family.mass(1)) == 0.0)) {
        continue;
      }
      Ledger ledger;
      const auto start = std::chrono::steady_clock::now();
      const auto r = run_algorithm(a, prep, inst.empirical, ledger, opt.seed);
      const auto stop = std::chrono::steady_clock::now();
      rows.push_back({m, a, r.h_products, r.term_evaluations,
                      std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()});
    }
  }
  return rows;
}

inline int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.sizes.empty() || opt.omega < 1 ||
      std::any_of(opt.sizes.begin(), opt.sizes.end(), [](std::size_t m) { return m < 1; })) {
    err << "sizes and omega must be positive\n";
    return kExitInvalid;
  }
  std::ofstream file;
  if (!opt.out_path.empty()) {
    file.open(opt.out_path);
    if (!file) {
      err << "cannot write '" << opt.out_path << "'\n";
      return kExitInvalid;
    }
  }
  std::ostream& csv = opt.out_path.empty() ? out : file;
  const auto rows = bench_rows(opt);
  bool exact = true;
  csv << "family_size,algorithm,h_products,term_evaluations,wall_time_ns\n";
  for (const auto& r : rows) {
    csv << r.family_size << ',' << algorithm_name(r.algorithm) << ',' << r.h_products << ',' << r.term_evaluations
        << ',' << r.wall_time_ns << '\n';
    const auto want = expected_cost(r.algorithm, r.family_size);
    if (want.h_products != r.h_products || want.term_evaluations != r.term_evaluations) {
      err << "count mismatch: m=" << r.family_size << ' ' << algorithm_name(r.algorithm) << '\n';
      exact = false;
    }
  }
  return exact ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string example;  // three | nine | vcdim | random
  double eps = 0.01;
  int n = 4;
  std::uint64_t seed = 1;
  std::size_t omega = 4;
  std::size_t family_size = 4;
  double noise = 0.05;
  std::string out_dir;
};

/// Writes family.json, and for instances also empirical.json and truth.json,
/// into out_dir.
inline int run_gen(const GenOptions& opt, std::ostream& out, std::ostream& err) {
  std::optional<Instance> inst;
  Family family;
  try {
    if (opt.example == "three") {
      inst = gen_lower_bound_3(opt.eps);
    } else if (opt.example == "nine") {
      inst = gen_lower_bound_9(opt.eps);
    } else if (opt.example == "vcdim") {
      family = gen_vc_family(opt.n);
    } else if (opt.example == "random") {
      inst = random_instance(opt.seed, opt.omega, opt.family_size, opt.noise);
    } else {
      err << "unknown example '" << opt.example << "'\n";
      return kExitInvalid;
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitInvalid;
  }
  if (inst) family = inst->family;

  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  const std::filesystem::path dir(opt.out_dir);
  std::vector<std::string> written;
  auto write = [&](const char* name, const json& j) {
    const auto p = (dir / name).string();
    if (!io::write_json_file(p, j)) return false;
    written.push_back(p);
    return true;
  };
  bool ok = write("family.json", io::family_to_json(family));
  if (ok && inst) {
    ok = write("empirical.json", io::empirical_to_json(inst->empirical)) &&
         write("truth.json", io::truth_to_json(inst->truth));
  }
  if (!ok) {
    err << "cannot write into '" << opt.out_dir << "'\n";
    return kExitInvalid;
  }
  out << json{{"written", written}, {"candidates", family.size()}, {"atoms", family.support().size()}}.dump(2)
      << '\n';
  return kExitOk;
}

}  // namespace l1select::cli
