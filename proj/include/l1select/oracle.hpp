#pragma once

// Brute-force verifiers. Nothing here reuses the selectors' comparison path:
// wins are recomputed from raw residual products, loss-weights from scratch,
// and VC dimension two different ways.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "l1select/density.hpp"
#include "l1select/selectors.hpp"

namespace l1select::oracle {

inline constexpr double kBoundSlack = 1e-9;
inline constexpr double kIdentitySlack = 1e-12;
inline constexpr std::size_t kMaxVcDomain = 12;
inline constexpr std::size_t kMaxVcFamily = 64;

/// f_i wins against f_j iff (f_i - h).T_ij < (f_j - h).T_ji.
inline Outcome raw_win(std::span<const double> fi, std::span<const double> fj, std::span<const double> h) {
  const TestFunction tij = test_function(fi, fj);
  const double lhs = inner_product(difference(fi, h), tij);
  const double rhs = inner_product(difference(fj, h), -tij);
  return classify(rhs - lhs);
}

struct Closest {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Exhaustive argmin of ||f - g||_1, lowest index on ties.
inline Closest best_in_family(const Family& family, std::span<const double> g) {
  if (family.empty()) throw Error(ErrorCode::EmptyFamily, "best_in_family on empty family");
  Closest best{0, l1_distance(family.mass(0), g)};
  for (std::size_t i = 1; i < family.size(); ++i) {
    const double d = l1_distance(family.mass(i), g);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

enum class DeltaMode { Full, Restricted };

struct BoundCheck {
  double a = 0.0;
  double b = 0.0;
  double lhs = 0.0;  // achieved error
  double d1 = 0.0;
  double delta = 0.0;
  double rhs = 0.0;  // a * d1 + b * delta
  double margin = 0.0;
  bool pass = false;
};

inline BoundCheck make_bound(double achieved, const Family& family, std::span<const double> g,
                             std::span<const double> h, double a, double b, DeltaMode mode) {
  BoundCheck c;
  c.a = a;
  c.b = b;
  c.lhs = achieved;
  const Closest best = best_in_family(family, g);
  c.d1 = best.distance;
  c.delta = mode == DeltaMode::Full ? delta(g, h, family) : delta_restricted(g, h, family, best.index);
  c.rhs = a * c.d1 + b * c.delta;
  c.margin = c.rhs - c.lhs;
  c.pass = c.margin >= -kBoundSlack;
  return c;
}

/// ||f_selected - g|| <= a * d1(g, F) + b * Delta, with Delta either over all
/// test-functions or only those of the member closest to g.
inline BoundCheck check_bound(std::size_t selected, const Family& family, std::span<const double> g,
                              std::span<const double> h, double a, double b, DeltaMode mode = DeltaMode::Full) {
  if (selected >= family.size()) throw Error(ErrorCode::IndexOutOfRange, "selected index out of range");
  return make_bound(l1_distance(family.mass(selected), g), family, g, h, a, b, mode);
}

/// Bound on the expected error of a random selection with the given weights.
inline BoundCheck check_mixture_bound(std::span<const double> weights, const Family& family,
                                      std::span<const double> g, std::span<const double> h, double a, double b,
                                      DeltaMode mode = DeltaMode::Full) {
  require_same_length(weights.size(), family.size());
  double expected = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) expected += weights[i] * l1_distance(family.mass(i), g);
  return make_bound(expected, family, g, h, a, b, mode);
}

/// Loss-weights of every member from the raw win relation; -inf for
/// undefeated members.
inline std::vector<double> brute_force_loss_weights(const Family& family, std::span<const double> h) {
  const std::size_t m = family.size();
  std::vector<double> lw(m, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      if (raw_win(family.mass(i), family.mass(j), h) != Outcome::FirstWins) {
        lw[i] = std::max(lw[i], l1_distance(family.mass(i), family.mass(j)));
      }
    }
  }
  return lw;
}

/// Output condition of Algorithm 4b, relaxed by C >= 1, checked against
/// brute-force loss-weights.
inline bool check_4b_invariant(const Family& family, std::span<const double> h, std::size_t selected, double C,
                               LossReading reading = LossReading::StrictLoss) {
  if (C < 1.0) throw Error(ErrorCode::ParameterOutOfRange, "relaxation constant must be >= 1");
  if (selected >= family.size()) throw Error(ErrorCode::IndexOutOfRange, "selected index out of range");
  const auto lw = brute_force_loss_weights(family, h);
  for (std::size_t other = 0; other < family.size(); ++other) {
    if (other == selected) continue;
    const Outcome o = raw_win(family.mass(selected), family.mass(other), h);
    const bool relevant = reading == LossReading::StrictLoss ? o == Outcome::SecondWins : o != Outcome::FirstWins;
    if (!relevant) continue;
    if (l1_distance(family.mass(selected), family.mass(other)) > C * lw[other] + kIdentitySlack) return false;
  }
  return true;
}

inline bool check_4b_invariant(const PreprocessedFamily& prep, const EmpiricalDistribution& h, std::size_t selected,
                               double C, LossReading reading = LossReading::StrictLoss) {
  return check_4b_invariant(prep.family(), h.mass(), selected, C, reading);
}

struct WinAgreement {
  Outcome by_test_function = Outcome::Draw;
  Outcome by_scheffe_set = Outcome::Draw;
  bool agree() const noexcept { return by_test_function == by_scheffe_set; }
};

/// Test-function rule against the Scheffe-set rule. Both sides throw on
/// unnormalized input.
inline WinAgreement check_win_equivalence(std::span<const double> fi, std::span<const double> fj,
                                          std::span<const double> h) {
  if (!is_distribution(fi) || !is_distribution(fj) || !is_distribution(h)) {
    throw Error(ErrorCode::NotNormalized, "win equivalence holds only for distributions");
  }
  return {raw_win(fi, fj, h), scheffe_win(fi, fj, h)};
}

/// (f_i - f_j).(T_ij - T_kl); nonnegative for any four members.
inline double check_quadruple(std::span<const double> fi, std::span<const double> fj, std::span<const double> fk,
                              std::span<const double> fl) {
  const TestFunction tij = test_function(fi, fj);
  const TestFunction tkl = test_function(fk, fl);
  const Mass d = difference(fi, fj);
  double s = 0.0;
  for (std::size_t x = 0; x < d.size(); ++x) s += d[x] * static_cast<double>(tij[x] - tkl[x]);
  return s;
}

/// Collection of atom subsets as bitmasks over a small domain.
class SetSystem {
 public:
  explicit SetSystem(std::size_t domain) : domain_(domain) {
    if (domain > 63) throw Error(ErrorCode::Capacity, "set system domain limited to 63 atoms");
  }

  void insert(std::uint64_t set) {
    if (domain_ < 64 && (set >> domain_) != 0) throw Error(ErrorCode::IndexOutOfRange, "set outside the domain");
    sets_.insert(set);
  }

  void insert_atoms(std::span<const std::size_t> atoms) {
    std::uint64_t s = 0;
    for (auto x : atoms) s |= std::uint64_t{1} << x;
    insert(s);
  }

  std::size_t domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return sets_.size(); }
  const std::set<std::uint64_t>& sets() const noexcept { return sets_; }

 private:
  std::size_t domain_;
  std::set<std::uint64_t> sets_;
};

/// Y_i: the Scheffe sets A_ij for j != i.
inline SetSystem restricted_yatracos(const Family& family, std::size_t i) {
  if (i >= family.size()) throw Error(ErrorCode::IndexOutOfRange, "restricted_yatracos index out of range");
  SetSystem s(family.support().size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (j != i) s.insert_atoms(scheffe_set(family.mass(i), family.mass(j)));
  }
  return s;
}

/// Y: all Scheffe sets A_ij, i != j, deduplicated.
inline SetSystem yatracos_class(const Family& family) {
  SetSystem s(family.support().size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = 0; j < family.size(); ++j) {
      if (i != j) s.insert_atoms(scheffe_set(family.mass(i), family.mass(j)));
    }
  }
  return s;
}

/// Largest shattered subset, by checking every subset of the domain.
inline std::size_t vc_dimension(const SetSystem& system) {
  if (system.domain() > kMaxVcDomain) throw Error(ErrorCode::Capacity, "VC computation limited to 12 atoms");
  if (system.size() == 0) return 0;  // nothing to shatter with; not even the empty set
  std::size_t best = 0;
  const std::uint64_t subsets = std::uint64_t{1} << system.domain();
  std::vector<char> seen;
  for (std::uint64_t probe = 1; probe < subsets; ++probe) {
    const auto width = static_cast<std::size_t>(std::popcount(probe));
    if (width <= best) continue;
    seen.assign(subsets, 0);
    std::size_t traces = 0;
    for (auto set : system.sets()) {
      const auto t = set & probe;
      if (!seen[t]) {
        seen[t] = 1;
        ++traces;
      }
    }
    if (traces == (std::size_t{1} << width)) best = width;
  }
  return best;
}

/// Same quantity by growing shattered sets one atom at a time. Shattered sets
/// are closed under taking subsets, so every shattered set of size d + 1 is
/// an extension of one of size d by a larger atom.
inline std::size_t vc_dimension_incremental(const SetSystem& system) {
  if (system.domain() > kMaxVcDomain) throw Error(ErrorCode::Capacity, "VC computation limited to 12 atoms");
  if (system.size() == 0) return 0;
  std::vector<std::vector<std::size_t>> level{{}};
  std::size_t dim = 0;
  while (!level.empty()) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& base : level) {
      const std::size_t start = base.empty() ? 0 : base.back() + 1;
      for (std::size_t x = start; x < system.domain(); ++x) {
        auto cand = base;
        cand.push_back(x);
        std::set<std::vector<bool>> traces;
        for (auto set : system.sets()) {
          std::vector<bool> t;
          t.reserve(cand.size());
          for (auto a : cand) t.push_back(((set >> a) & 1U) != 0);
          traces.insert(std::move(t));
        }
        if (traces.size() == (std::size_t{1} << cand.size())) next.push_back(std::move(cand));
      }
    }
    if (!next.empty()) dim = next.front().size();
    level = std::move(next);
  }
  return dim;
}

struct VcProfile {
  std::size_t full = 0;           // VC(Y)
  std::size_t max_restricted = 0; // max_i VC(Y_i)
};

inline VcProfile vc_profile(const Family& family) {
  if (family.size() > kMaxVcFamily) throw Error(ErrorCode::Capacity, "VC profile limited to 64 candidates");
  VcProfile p;
  p.full = vc_dimension(yatracos_class(family));
  for (std::size_t i = 0; i < family.size(); ++i) {
    p.max_restricted = std::max(p.max_restricted, vc_dimension(restricted_yatracos(family, i)));
  }
  return p;
}

}  // namespace l1select::oracle
