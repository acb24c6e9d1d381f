#pragma once

// Finite-support densities, test-functions and the pairwise win relation.
//
// Everything here is a pure function of its inputs except Ledger updates.
// A candidate family lives on a shared support of k atoms; every mass vector
// is aligned to the support ordering.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "l1select/error.hpp"

namespace l1select {

using Mass = std::vector<double>;

/// Absolute slack for normalization checks.
inline constexpr double kNormalizationTolerance = 1e-9;
/// Absolute slack below which two sides of a comparison are treated as equal.
inline constexpr double kTieTolerance = 1e-12;

class Support {
 public:
  Support() = default;
  explicit Support(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw Error(ErrorCode::SupportMismatch, "support must have at least one atom");
    std::unordered_set<std::string> seen;
    for (const auto& a : atoms_) {
      if (!seen.insert(a).second) throw Error(ErrorCode::SupportMismatch, "duplicate atom label '" + a + "'");
    }
  }

  /// Atoms labelled A1..Ak.
  static Support labelled(std::size_t k) {
    std::vector<std::string> atoms;
    atoms.reserve(k);
    for (std::size_t x = 1; x <= k; ++x) atoms.push_back("A" + std::to_string(x));
    return Support(std::move(atoms));
  }

  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<std::string>& atoms() const noexcept { return atoms_; }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = std::find(atoms_.begin(), atoms_.end(), label);
    if (it == atoms_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - atoms_.begin());
  }

  friend bool operator==(const Support&, const Support&) = default;

 private:
  std::vector<std::string> atoms_;
};

struct Candidate {
  std::string name;
  Mass mass;
};

inline bool is_distribution(std::span<const double> v, double tol = kNormalizationTolerance) {
  double total = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < -tol) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= tol;
}

inline void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::SupportMismatch,
                "vector lengths differ (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

/// Ordered collection of candidates over one support. Immutable once built.
class Family {
 public:
  Family() = default;
  Family(Support support, std::vector<Candidate> members)
      : support_(std::move(support)), members_(std::move(members)) {
    for (const auto& c : members_) {
      require_same_length(c.mass.size(), support_.size());
      for (double x : c.mass) {
        if (!std::isfinite(x)) throw Error(ErrorCode::ParameterOutOfRange, "non-finite mass in '" + c.name + "'");
      }
    }
  }

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const Support& support() const noexcept { return support_; }
  const std::vector<Candidate>& members() const noexcept { return members_; }
  const Candidate& operator[](std::size_t i) const { return members_.at(i); }
  const Mass& mass(std::size_t i) const { return members_.at(i).mass; }

 private:
  Support support_;
  std::vector<Candidate> members_;
};

class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  static EmpiricalDistribution from_mass(Mass mass) {
    if (!is_distribution(mass)) throw Error(ErrorCode::NotNormalized, "empirical mass must be nonnegative and sum to 1");
    EmpiricalDistribution h;
    h.mass_ = std::move(mass);
    return h;
  }

  /// Normalized histogram: each entry is count/n.
  static EmpiricalDistribution from_counts(std::span<const std::uint64_t> counts) {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    if (n == 0) throw Error(ErrorCode::ParameterOutOfRange, "empirical distribution needs at least one sample");
    EmpiricalDistribution h;
    h.mass_.reserve(counts.size());
    for (auto c : counts) h.mass_.push_back(static_cast<double>(c) / static_cast<double>(n));
    h.sample_count_ = n;
    return h;
  }

  const Mass& mass() const noexcept { return mass_; }
  std::size_t size() const noexcept { return mass_.size(); }
  std::optional<std::uint64_t> sample_count() const noexcept { return sample_count_; }

 private:
  Mass mass_;
  std::optional<std::uint64_t> sample_count_;
};

/// Atomwise sign pattern in {-1, 0, +1}.
class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {}

  std::size_t size() const noexcept { return signs_.size(); }
  std::int8_t operator[](std::size_t x) const { return signs_[x]; }
  const std::vector<std::int8_t>& signs() const noexcept { return signs_; }

  TestFunction operator-() const {
    TestFunction t = *this;
    for (auto& s : t.signs_) s = static_cast<std::int8_t>(-s);
    return t;
  }

  friend bool operator==(const TestFunction&, const TestFunction&) = default;

 private:
  std::vector<std::int8_t> signs_;
};

inline TestFunction test_function(std::span<const double> fi, std::span<const double> fj) {
  require_same_length(fi.size(), fj.size());
  std::vector<std::int8_t> signs(fi.size());
  for (std::size_t x = 0; x < fi.size(); ++x) {
    double d = fi[x] - fj[x];
    signs[x] = static_cast<std::int8_t>((d > 0.0) - (d < 0.0));
  }
  return TestFunction(std::move(signs));
}

inline double inner_product(std::span<const double> v, const TestFunction& t) {
  require_same_length(v.size(), t.size());
  double sum = 0.0;
  for (std::size_t x = 0; x < v.size(); ++x) sum += v[x] * static_cast<double>(t[x]);
  return sum;
}

inline Mass difference(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size());
  Mass d(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) d[x] = a[x] - b[x];
  return d;
}

/// Same summation order as inner_product(fi - fj, test_function(fi, fj)), so
/// the two agree bit for bit.
inline double l1_distance(std::span<const double> fi, std::span<const double> fj) {
  require_same_length(fi.size(), fj.size());
  double sum = 0.0;
  for (std::size_t x = 0; x < fi.size(); ++x) sum += std::abs(fi[x] - fj[x]);
  return sum;
}

enum class Outcome { FirstWins, SecondWins, Draw };

inline Outcome flip(Outcome o) {
  switch (o) {
    case Outcome::FirstWins: return Outcome::SecondWins;
    case Outcome::SecondWins: return Outcome::FirstWins;
    case Outcome::Draw: return Outcome::Draw;
  }
  return o;
}

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::FirstWins: return "first-wins";
    case Outcome::SecondWins: return "second-wins";
    case Outcome::Draw: return "draw";
  }
  return "?";
}

/// Cost counters for one selection run. Only h-side work is metered;
/// member-only products belong to preprocessing and are free.
class Ledger {
 public:
  void count_h_product(std::uint64_t n = 1) noexcept { h_products_ += n; }
  void count_terms(std::uint64_t n = 1) noexcept { term_evaluations_ += n; }

  std::uint64_t h_products() const noexcept { return h_products_; }
  std::uint64_t term_evaluations() const noexcept { return term_evaluations_; }

 private:
  std::uint64_t h_products_ = 0;
  std::uint64_t term_evaluations_ = 0;
};

struct PairRecord {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double distance = 0.0;
  // (f_i.T_ij + f_j.T_ij) / 2; f_i wins iff h.T_ij exceeds it.
  double threshold = 0.0;
  TestFunction test;
};

inline std::size_t pair_count(std::size_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

/// Family plus everything computable without h: test-functions, distances,
/// win thresholds, member products, and the pair list sorted by decreasing
/// distance (ties by (i, j)).
class PreprocessedFamily {
 public:
  explicit PreprocessedFamily(Family family) : family_(std::move(family)) {
    const std::size_t m = family_.size();
    if (m == 0) throw Error(ErrorCode::EmptyFamily, "cannot preprocess an empty family");
    pairs_.reserve(pair_count(m));
    member_products_.reserve(pair_count(m) * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        PairRecord p;
        p.i = i;
        p.j = j;
        p.test = test_function(family_.mass(i), family_.mass(j));
        p.distance = l1_distance(family_.mass(i), family_.mass(j));
        for (std::size_t r = 0; r < m; ++r) member_products_.push_back(inner_product(family_.mass(r), p.test));
        const double* row = &member_products_[pairs_.size() * m];
        p.threshold = (row[i] + row[j]) / 2.0;
        pairs_.push_back(std::move(p));
      }
    }
    order_.resize(pairs_.size());
    for (std::size_t r = 0; r < order_.size(); ++r) order_[r] = r;
    std::stable_sort(order_.begin(), order_.end(),
                     [this](std::size_t a, std::size_t b) { return pairs_[a].distance > pairs_[b].distance; });
  }

  const Family& family() const noexcept { return family_; }
  std::size_t size() const noexcept { return family_.size(); }
  std::size_t support_size() const noexcept { return family_.support().size(); }

  /// Pair record for i < j.
  const PairRecord& pair(std::size_t i, std::size_t j) const { return pairs_[index_of(i, j)]; }

  /// Indices into pairs in decreasing-distance order.
  std::span<const std::size_t> sorted_order() const noexcept { return order_; }
  std::span<const PairRecord> pairs() const noexcept { return pairs_; }

  /// T_ij for either orientation.
  TestFunction test(std::size_t i, std::size_t j) const {
    return i < j ? pair(i, j).test : -pair(j, i).test;
  }

  double distance(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return i < j ? pair(i, j).distance : pair(j, i).distance;
  }

  /// f_r . T_ij for either orientation of (i, j).
  double member_product(std::size_t r, std::size_t i, std::size_t j) const {
    check_pair(i, j);
    const double v = member_products_.at(pair_index(std::min(i, j), std::max(i, j)) * size() + r);
    return i < j ? v : -v;
  }

 private:
  void check_pair(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) throw Error(ErrorCode::IndexOutOfRange, "pair index out of range");
    if (i == j) throw Error(ErrorCode::InvalidPair, "a candidate cannot be paired with itself");
  }

  std::size_t pair_index(std::size_t i, std::size_t j) const {
    // Row-major position of (i, j), i < j, in the upper triangle.
    const std::size_t m = size();
    return i * (2 * m - i - 1) / 2 + (j - i - 1);
  }

  std::size_t index_of(std::size_t i, std::size_t j) const {
    check_pair(i, j);
    if (i > j) throw Error(ErrorCode::InvalidPair, "pair(i, j) expects i < j");
    return pair_index(i, j);
  }

  Family family_;
  std::vector<PairRecord> pairs_;
  std::vector<std::size_t> order_;
  std::vector<double> member_products_;
};

inline PreprocessedFamily preprocess(Family family) { return PreprocessedFamily(std::move(family)); }

inline Outcome classify(double margin) {
  if (std::abs(margin) <= kTieTolerance) return Outcome::Draw;
  return margin > 0.0 ? Outcome::FirstWins : Outcome::SecondWins;
}

/// Win relation between f_i and f_j on h. One h-side inner product.
inline Outcome compare(const PreprocessedFamily& prep, std::size_t i, std::size_t j,
                       const EmpiricalDistribution& h, Ledger& ledger) {
  if (i >= prep.size() || j >= prep.size()) throw Error(ErrorCode::IndexOutOfRange, "compare index out of range");
  if (i == j) throw Error(ErrorCode::InvalidPair, "compare needs two distinct candidates");
  require_same_length(h.size(), prep.support_size());
  if (i > j) return flip(compare(prep, j, i, h, ledger));
  const PairRecord& p = prep.pair(i, j);
  ledger.count_h_product();
  return classify(inner_product(h.mass(), p.test) - p.threshold);
}

/// Atoms where fi is strictly larger.
inline std::vector<std::size_t> scheffe_set(std::span<const double> fi, std::span<const double> fj) {
  require_same_length(fi.size(), fj.size());
  std::vector<std::size_t> atoms;
  for (std::size_t x = 0; x < fi.size(); ++x) {
    if (fi[x] > fj[x]) atoms.push_back(x);
  }
  return atoms;
}

inline double mass_of(std::span<const double> v, std::span<const std::size_t> atoms) {
  double s = 0.0;
  for (auto x : atoms) s += v[x];
  return s;
}

/// Set-based win rule on the Scheffe set A_ij. Only meaningful for
/// distributions, so unnormalized input is rejected.
inline Outcome scheffe_win(std::span<const double> fi, std::span<const double> fj, std::span<const double> h) {
  require_same_length(fi.size(), fj.size());
  require_same_length(fi.size(), h.size());
  if (!is_distribution(fi) || !is_distribution(fj) || !is_distribution(h)) {
    throw Error(ErrorCode::NotNormalized, "scheffe_win requires normalized distributions");
  }
  const auto a = scheffe_set(fi, fj);
  const double ha = mass_of(h, a);
  const double first = std::abs(mass_of(fi, a) - ha);
  const double second = std::abs(mass_of(fj, a) - ha);
  return classify(second - first);
}

/// max over test-functions T_ij of (g - h).T, zero for fewer than two members.
inline double delta(std::span<const double> g, std::span<const double> h, const Family& family) {
  require_same_length(g.size(), h.size());
  require_same_length(g.size(), family.support().size());
  const Mass diff = difference(g, h);
  double best = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      best = std::max(best, std::abs(inner_product(diff, test_function(family.mass(i), family.mass(j)))));
    }
  }
  return best;
}

/// Same as delta but only over test-functions T_ij with fixed i.
inline double delta_restricted(std::span<const double> g, std::span<const double> h, const Family& family,
                               std::size_t i) {
  if (i >= family.size()) throw Error(ErrorCode::IndexOutOfRange, "delta_restricted index out of range");
  require_same_length(g.size(), h.size());
  require_same_length(g.size(), family.support().size());
  const Mass diff = difference(g, h);
  double best = 0.0;
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (j == i) continue;
    best = std::max(best, std::abs(inner_product(diff, test_function(family.mass(i), family.mass(j)))));
  }
  return best;
}

}  // namespace l1select
