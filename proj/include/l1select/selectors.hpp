#pragma once

// The six selection procedures. Each returns a SelectionReport whose counts
// are taken from the Ledger passed in, so the report reflects exactly the
// h-side work done during that call.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l1select/density.hpp"
#include "l1select/rng.hpp"

namespace l1select {

enum class Algorithm {
  Tournament,
  MinDistance,
  ModifiedMinDistance,
  MinLossWeight,
  EfficientMinLossWeight,
  Randomized,
};

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::Tournament,    Algorithm::MinDistance,           Algorithm::ModifiedMinDistance,
    Algorithm::MinLossWeight, Algorithm::EfficientMinLossWeight, Algorithm::Randomized,
};

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Tournament: return "tournament";
    case Algorithm::MinDistance: return "mindist";
    case Algorithm::ModifiedMinDistance: return "modified";
    case Algorithm::MinLossWeight: return "minloss";
    case Algorithm::EfficientMinLossWeight: return "efficient";
    case Algorithm::Randomized: return "randomized";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms) {
    if (algorithm_name(a) == name) return a;
  }
  return std::nullopt;
}

struct TraceEvent {
  std::size_t first = 0;
  std::size_t second = 0;
  Outcome outcome = Outcome::Draw;
  std::optional<std::size_t> removed;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct SelectionReport {
  Algorithm algorithm = Algorithm::Tournament;
  std::size_t selected = 0;
  std::string selected_name;
  std::uint64_t h_products = 0;
  std::uint64_t term_evaluations = 0;
  std::vector<TraceEvent> trace;
  // Per-candidate selection score: wins (tournament), worst discrepancy
  // (mindist, modified), loss-weight (minloss). Empty otherwise.
  std::vector<double> scores;
  std::optional<std::uint64_t> seed;
  // (p, 1 - p): probability of outputting the first / second candidate.
  std::optional<std::pair<double, double>> mixture;

  friend bool operator==(const SelectionReport&, const SelectionReport&) = default;
};

/// -inf when the candidate beats everyone; otherwise the largest distance to
/// a member it does not beat.
struct LossWeightValue {
  double value = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> witness;

  bool undefeated() const noexcept { return !witness.has_value(); }
};

/// What happens when Algorithm 4b's comparison is a draw.
enum class DrawPolicy {
  RemoveSecond,  // the pseudocode's else-branch
  RemoveFirst,   // fault-injection variant used by self-tests
};

/// Which relation triggers the output condition of the elimination selector.
enum class LossReading {
  StrictLoss,  // f loses to f'
  NotWinning,  // f does not beat f' (draws included)
};

namespace detail {

inline void require_nonempty(const Family& family) {
  if (family.empty()) throw Error(ErrorCode::EmptyFamily, "selection needs at least one candidate");
}

/// Lowest index among scores within kTieTolerance of the running minimum.
inline std::size_t argmin_lowest(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best] - kTieTolerance) best = i;
  }
  return best;
}

class RunCounter {
 public:
  explicit RunCounter(const Ledger& ledger)
      : ledger_(ledger), h0_(ledger.h_products()), t0_(ledger.term_evaluations()) {}

  void fill(SelectionReport& r) const {
    r.h_products = ledger_.h_products() - h0_;
    r.term_evaluations = ledger_.term_evaluations() - t0_;
  }

 private:
  const Ledger& ledger_;
  std::uint64_t h0_;
  std::uint64_t t0_;
};

inline SelectionReport finish(Algorithm a, const Family& family, std::size_t selected, const RunCounter& counter) {
  SelectionReport r;
  r.algorithm = a;
  r.selected = selected;
  r.selected_name = family[selected].name;
  counter.fill(r);
  return r;
}

/// Outcome of every unordered pair, one comparison each. Entry [i][j] is
/// from i's point of view.
inline std::vector<std::vector<Outcome>> outcome_table(const PreprocessedFamily& prep,
                                                       const EmpiricalDistribution& h, Ledger& ledger,
                                                       std::vector<TraceEvent>* trace = nullptr) {
  const std::size_t m = prep.size();
  std::vector<std::vector<Outcome>> table(m, std::vector<Outcome>(m, Outcome::Draw));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const Outcome o = compare(prep, i, j, h, ledger);
      table[i][j] = o;
      table[j][i] = flip(o);
      if (trace) trace->push_back({i, j, o, std::nullopt});
    }
  }
  return table;
}

inline LossWeightValue loss_weight_from_row(const PreprocessedFamily& prep, std::size_t i,
                                            const std::vector<Outcome>& row) {
  LossWeightValue lw;
  for (std::size_t j = 0; j < prep.size(); ++j) {
    if (j == i || row[j] == Outcome::FirstWins) continue;
    const double d = prep.distance(i, j);
    if (!lw.witness || d > lw.value) {
      lw.value = d;
      lw.witness = j;
    }
  }
  return lw;
}

}  // namespace detail

/// Algorithm 1: the candidate with the most pairwise wins; a draw scores for
/// neither side and ties go to the lowest index.
inline SelectionReport scheffe_tournament(const PreprocessedFamily& prep, const EmpiricalDistribution& h,
                                          Ledger& ledger) {
  const detail::RunCounter counter(ledger);
  std::vector<TraceEvent> trace;
  const auto table = detail::outcome_table(prep, h, ledger, &trace);
  const std::size_t m = prep.size();
  std::vector<double> wins(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && table[i][j] == Outcome::FirstWins) wins[i] += 1.0;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (wins[i] > wins[best]) best = i;
  }
  auto r = detail::finish(Algorithm::Tournament, prep.family(), best, counter);
  r.trace = std::move(trace);
  r.scores = std::move(wins);
  return r;
}

/// Algorithm 2: minimize over f the worst |(f - h).T_ij| across all ordered
/// pairs i != j. Every term is evaluated on its own: m * m(m-1) terms.
inline SelectionReport min_distance(const Family& family, const EmpiricalDistribution& h, Ledger& ledger) {
  detail::require_nonempty(family);
  require_same_length(h.size(), family.support().size());
  const detail::RunCounter counter(ledger);
  const PreprocessedFamily prep(family);
  const std::size_t m = family.size();
  std::vector<double> scores(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    const Mass residual = difference(family.mass(a), h.mass());
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        ledger.count_terms();
        scores[a] = std::max(scores[a], std::abs(inner_product(residual, prep.test(i, j))));
      }
    }
  }
  auto r = detail::finish(Algorithm::MinDistance, family, detail::argmin_lowest(scores), counter);
  r.scores = std::move(scores);
  return r;
}

/// Algorithm 3: minimize over f_i the worst |(f_i - h).T_ij| over j != i.
/// m(m-1) terms.
inline SelectionReport modified_min_distance(const Family& family, const EmpiricalDistribution& h,
                                             Ledger& ledger) {
  detail::require_nonempty(family);
  require_same_length(h.size(), family.support().size());
  const detail::RunCounter counter(ledger);
  const PreprocessedFamily prep(family);
  const std::size_t m = family.size();
  std::vector<double> scores(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const Mass residual = difference(family.mass(i), h.mass());
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      ledger.count_terms();
      scores[i] = std::max(scores[i], std::abs(inner_product(residual, prep.test(i, j))));
    }
  }
  auto r = detail::finish(Algorithm::ModifiedMinDistance, family, detail::argmin_lowest(scores), counter);
  r.scores = std::move(scores);
  return r;
}

/// Loss-weight of candidate i. Costs m - 1 comparisons.
inline LossWeightValue loss_weight(const PreprocessedFamily& prep, const EmpiricalDistribution& h, std::size_t i,
                                   Ledger& ledger) {
  if (i >= prep.size()) throw Error(ErrorCode::IndexOutOfRange, "loss_weight index out of range");
  std::vector<Outcome> row(prep.size(), Outcome::Draw);
  for (std::size_t j = 0; j < prep.size(); ++j) {
    if (j != i) row[j] = compare(prep, i, j, h, ledger);
  }
  return detail::loss_weight_from_row(prep, i, row);
}

/// Algorithm 4a: minimum loss-weight. Each unordered pair is compared once
/// and the outcome reused in both directions.
inline SelectionReport min_loss_weight(const PreprocessedFamily& prep, const EmpiricalDistribution& h,
                                       Ledger& ledger) {
  const detail::RunCounter counter(ledger);
  const auto table = detail::outcome_table(prep, h, ledger);
  std::vector<double> scores(prep.size());
  for (std::size_t i = 0; i < prep.size(); ++i) scores[i] = detail::loss_weight_from_row(prep, i, table[i]).value;
  auto r = detail::finish(Algorithm::MinLossWeight, prep.family(), detail::argmin_lowest(scores), counter);
  r.scores = std::move(scores);
  return r;
}

/// Algorithm 4b: walk the pair list in decreasing-distance order, comparing
/// the first pair whose endpoints both survive and removing the loser, until
/// one candidate is left. Exactly m - 1 comparisons; the walk itself is
/// O(m^2) because eliminated pairs are skipped in place.
inline SelectionReport efficient_min_loss_weight(const PreprocessedFamily& prep, const EmpiricalDistribution& h,
                                                 Ledger& ledger, DrawPolicy draws = DrawPolicy::RemoveSecond) {
  const detail::RunCounter counter(ledger);
  const std::size_t m = prep.size();
  std::vector<bool> alive(m, true);
  std::size_t survivors = m;
  std::vector<TraceEvent> trace;
  const auto pairs = prep.pairs();
  for (std::size_t idx : prep.sorted_order()) {
    if (survivors == 1) break;
    const PairRecord& p = pairs[idx];
    if (!alive[p.i] || !alive[p.j]) continue;
    const Outcome o = compare(prep, p.i, p.j, h, ledger);
    std::size_t removed = p.j;
    if (o == Outcome::SecondWins || (o == Outcome::Draw && draws == DrawPolicy::RemoveFirst)) removed = p.i;
    alive[removed] = false;
    --survivors;
    trace.push_back({p.i, p.j, o, removed});
  }
  std::size_t winner = 0;
  while (!alive[winner]) ++winner;
  auto r = detail::finish(Algorithm::EfficientMinLossWeight, prep.family(), winner, counter);
  r.trace = std::move(trace);
  return r;
}

/// Algorithm 5 for a two-member family: output f1 with probability 1/(r+1),
/// r = |(f1 - h).T12| / |(f2 - h).T12|, r = inf when the denominator is 0.
/// Uses one h-side product; the residual products come from member products.
inline SelectionReport randomized_two(const Candidate& f1, const Candidate& f2, const EmpiricalDistribution& h,
                                      std::uint64_t seed, Ledger& ledger) {
  require_same_length(f1.mass.size(), f2.mass.size());
  require_same_length(f1.mass.size(), h.size());
  if (l1_distance(f1.mass, f2.mass) == 0.0) {
    throw Error(ErrorCode::DegeneratePair, "randomized selection needs two distinct candidates");
  }
  Family family(Support::labelled(f1.mass.size()), {f1, f2});
  const detail::RunCounter counter(ledger);
  const TestFunction t = test_function(f1.mass, f2.mass);
  ledger.count_h_product();
  const double ht = inner_product(h.mass(), t);
  const double num = std::abs(inner_product(f1.mass, t) - ht);
  const double den = std::abs(inner_product(f2.mass, t) - ht);
  // p = 1/(r+1) = den/(num+den); num + den >= ||f1 - f2||_1 > 0.
  const double p = den == 0.0 ? 0.0 : den / (num + den);
  Rng rng(seed);
  const std::size_t pick = rng.bernoulli(p) ? 0 : 1;
  auto r = detail::finish(Algorithm::Randomized, family, pick, counter);
  r.seed = seed;
  r.mixture = std::make_pair(p, 1.0 - p);
  return r;
}

inline SelectionReport randomized_two(const Family& family, const EmpiricalDistribution& h, std::uint64_t seed,
                                      Ledger& ledger) {
  if (family.size() != 2) {
    throw Error(ErrorCode::FamilySize, "randomized selection is defined for exactly two candidates, got " +
                                           std::to_string(family.size()));
  }
  return randomized_two(family[0], family[1], h, seed, ledger);
}

struct RelaxedCheck {
  bool pass = true;
  // min over relevant f' of C * loss-weight(f') - ||f_sel - f'||_1; +inf if vacuous.
  double margin = std::numeric_limits<double>::infinity();
};

/// Is `selected` an acceptable output under the relaxed condition
/// ||f - f'|| <= C * loss-weight(f') for every f' that f loses to?
/// C = 1 is the exact output condition of Algorithm 4b.
inline RelaxedCheck relaxed_selection_check(const PreprocessedFamily& prep, const EmpiricalDistribution& h,
                                            std::size_t selected, double C,
                                            LossReading reading = LossReading::StrictLoss) {
  if (C < 1.0) throw Error(ErrorCode::ParameterOutOfRange, "relaxation constant must be >= 1");
  if (selected >= prep.size()) throw Error(ErrorCode::IndexOutOfRange, "selected index out of range");
  Ledger scratch;
  const auto table = detail::outcome_table(prep, h, scratch);
  RelaxedCheck out;
  for (std::size_t other = 0; other < prep.size(); ++other) {
    if (other == selected) continue;
    const Outcome o = table[selected][other];
    const bool relevant = reading == LossReading::StrictLoss ? o == Outcome::SecondWins : o != Outcome::FirstWins;
    if (!relevant) continue;
    const double lw = detail::loss_weight_from_row(prep, other, table[other]).value;
    const double slack = C * lw - prep.distance(selected, other);
    out.margin = std::min(out.margin, slack);
    if (slack < -kTieTolerance) out.pass = false;
  }
  return out;
}

/// Runs any algorithm with its natural inputs. Randomized requires m == 2.
inline SelectionReport run_algorithm(Algorithm a, const PreprocessedFamily& prep, const EmpiricalDistribution& h,
                                     Ledger& ledger, std::uint64_t seed = 0,
                                     DrawPolicy draws = DrawPolicy::RemoveSecond) {
  switch (a) {
    case Algorithm::Tournament: return scheffe_tournament(prep, h, ledger);
    case Algorithm::MinDistance: return min_distance(prep.family(), h, ledger);
    case Algorithm::ModifiedMinDistance: return modified_min_distance(prep.family(), h, ledger);
    case Algorithm::MinLossWeight: return min_loss_weight(prep, h, ledger);
    case Algorithm::EfficientMinLossWeight: return efficient_min_loss_weight(prep, h, ledger, draws);
    case Algorithm::Randomized: return randomized_two(prep.family(), h, seed, ledger);
  }
  throw Error(ErrorCode::ParameterOutOfRange, "unknown algorithm");
}

}  // namespace l1select
