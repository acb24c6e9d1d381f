#pragma once

// Instance generators: the two lower-bound tables, the family whose
// restricted Yatracos classes are simpler than the full class, seeded random
// instances, and i.i.d. sampling of empirical distributions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "l1select/density.hpp"
#include "l1select/rng.hpp"

namespace l1select {

struct Instance {
  Family family;
  Mass truth;  // g
  EmpiricalDistribution empirical;  // h
  std::string label;
};

/// Two candidates on four atoms where any deterministic test-function rule
/// can be forced into error close to 3 d1. g = h puts no weight on T12.
inline Instance gen_lower_bound_3(double eps) {
  if (!(eps > 0.0 && eps < 0.25)) throw Error(ErrorCode::ParameterOutOfRange, "eps must lie in (0, 1/4)");
  Mass f1{0.0, 0.25 + eps, 0.5, 0.25 - eps};
  Mass f2{0.5 + eps, 0.25 - eps, 0.0, 0.25};
  Mass g{0.5, 0.5, 0.0, 0.0};
  Instance inst{Family(Support::labelled(4), {{"f1", std::move(f1)}, {"f2", std::move(f2)}}), g,
                EmpiricalDistribution::from_mass(g), "lower-bound-3"};
  return inst;
}

/// Relabels a two-member family: f'1 = f2, f'2 = f1. Truth and empirical are
/// unchanged, and every test-function value carries over with a sign flip.
inline Instance swap_family(const Instance& inst) {
  if (inst.family.size() != 2) throw Error(ErrorCode::FamilySize, "swap_family needs exactly two candidates");
  Instance out = inst;
  out.family = Family(inst.family.support(), {inst.family[1], inst.family[0]});
  out.label = inst.label.ends_with(":swapped") ? inst.label.substr(0, inst.label.size() - 8) : inst.label + ":swapped";
  return out;
}

inline constexpr double kNineEpsMax = 1.0 / 60.0;

/// Six atoms, candidates {f1, f2, f3, f3'} with f3' = f3 and g = h, where the
/// tournament picks f1 with error close to 9 d1.
inline Instance gen_lower_bound_9(double eps) {
  if (!(eps > 0.0 && eps <= kNineEpsMax)) throw Error(ErrorCode::ParameterOutOfRange, "eps must lie in (0, 1/60]");
  const double e = eps;
  Mass g{2.0 / 3 - 21 * e, 1.0 / 9 - 2 * e, 9 * e, 0.0, 2.0 / 9 + 14 * e, 0.0};
  Mass f1{0.0, 18 * e, 2.0 / 3 - 12 * e, 2.0 / 9 - 13 * e, 9 * e, 1.0 / 9 - 2 * e};
  Mass f2{2.0 / 3 - 30 * e, 0.0, 0.0, 0.0, 2.0 / 9 + 14 * e, 1.0 / 9 + 16 * e};
  Mass f3{2.0 / 3 - 21 * e, 9 * e, 9 * e, 2.0 / 9 - 4 * e, 0.0, 1.0 / 9 + 7 * e};
  std::vector<Candidate> members{{"f1", f1}, {"f2", f2}, {"f3", f3}, {"f3'", f3}};
  return Instance{Family(Support::labelled(6), std::move(members)), g, EmpiricalDistribution::from_mass(g),
                  "lower-bound-9"};
}

/// 2^(n+1) distributions on atoms {0..n}, one per bit string a0..an:
///   P(k) = (1/(4n)) (1 + (1/2 - a0)(1/2 - ak)) 2^(-sum_{j>=1} a_j 2^j),  k >= 1
///   P(0) = 1 - sum_{k>=1} P(k)
/// Candidate names are the bit strings a0 a1 .. an.
inline Family gen_vc_family(int n) {
  if (n < 2 || n > 6) throw Error(ErrorCode::ParameterOutOfRange, "n must lie in [2, 6]");
  const std::size_t atoms = static_cast<std::size_t>(n) + 1;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < atoms; ++k) labels.push_back(std::to_string(k));
  std::vector<Candidate> members;
  for (std::uint32_t code = 0; code < (1U << atoms); ++code) {
    // bit k of code is a_k
    auto bit = [code](std::size_t k) { return static_cast<int>((code >> k) & 1U); };
    int exponent = 0;
    for (int j = 1; j <= n; ++j) exponent += bit(static_cast<std::size_t>(j)) << j;
    const double scale = std::ldexp(1.0, -exponent) / (4.0 * n);
    Mass p(atoms, 0.0);
    double tail = 0.0;
    for (std::size_t k = 1; k < atoms; ++k) {
      p[k] = scale * (1.0 + (0.5 - bit(0)) * (0.5 - bit(k)));
      tail += p[k];
    }
    p[0] = 1.0 - tail;
    if (p[0] < 0.0) throw Error(ErrorCode::ParameterOutOfRange, "residual mass at atom 0 would be negative");
    std::string name;
    for (std::size_t k = 0; k < atoms; ++k) name.push_back(bit(k) ? '1' : '0');
    members.push_back({std::move(name), std::move(p)});
  }
  return Family(Support(std::move(labels)), std::move(members));
}

namespace detail {

inline Mass random_distribution(Rng& rng, std::size_t k) {
  Mass v(k);
  double total = 0.0;
  for (auto& x : v) {
    x = 0.05 + rng.uniform();
    total += x;
  }
  for (auto& x : v) x /= total;
  return v;
}

inline void normalize(Mass& v) {
  double total = 0.0;
  for (double x : v) total += x;
  for (auto& x : v) x /= total;
}

}  // namespace detail

/// Seeded random instance on k atoms with m candidates.
///
/// Candidates are normalized positive vectors. To exercise draws and zero
/// test-function entries, some instances zero one shared atom in every
/// candidate, and some duplicate a candidate. g is either fresh or a
/// perturbed candidate; h is g plus uniform noise in [-noise, noise] per
/// atom, clipped at 0 and renormalized (h = g exactly when noise = 0).
inline Instance random_instance(std::uint64_t seed, std::size_t k, std::size_t m, double noise) {
  if (k == 0 || m == 0) throw Error(ErrorCode::ParameterOutOfRange, "random_instance needs k >= 1 and m >= 1");
  if (!(noise >= 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "noise must be nonnegative");
  Rng rng(seed);
  std::vector<Mass> masses;
  for (std::size_t i = 0; i < m; ++i) masses.push_back(detail::random_distribution(rng, k));
  if (k > 1 && rng.bernoulli(0.25)) {
    const std::size_t hole = rng.below(k);
    for (auto& v : masses) {
      v[hole] = 0.0;
      detail::normalize(v);
    }
  }
  if (m > 1 && rng.bernoulli(0.125)) {
    const std::size_t from = rng.below(m);
    const std::size_t to = rng.below(m);
    masses[to] = masses[from];
  }

  Mass g;
  if (rng.bernoulli(0.5)) {
    g = detail::random_distribution(rng, k);
  } else {
    g = masses[rng.below(m)];
    const double mix = rng.uniform(0.0, 0.5);
    const Mass other = detail::random_distribution(rng, k);
    for (std::size_t x = 0; x < k; ++x) g[x] = (1.0 - mix) * g[x] + mix * other[x];
    detail::normalize(g);
  }

  Mass h = g;
  if (noise > 0.0) {
    for (auto& x : h) x = std::max(0.0, x + rng.uniform(-noise, noise));
    double total = 0.0;
    for (double x : h) total += x;
    if (total > 0.0) {
      detail::normalize(h);
    } else {
      h = g;
    }
  }

  std::vector<Candidate> members;
  for (std::size_t i = 0; i < m; ++i) members.push_back({"f" + std::to_string(i + 1), std::move(masses[i])});
  return Instance{Family(Support::labelled(k), std::move(members)), std::move(g),
                  EmpiricalDistribution::from_mass(std::move(h)), "random:" + std::to_string(seed)};
}

/// n i.i.d. draws from g by inverse-CDF lookup; returns counts / n.
inline EmpiricalDistribution sample_empirical(std::span<const double> g, std::uint64_t n, std::uint64_t seed) {
  if (!is_distribution(g)) throw Error(ErrorCode::NotNormalized, "sampling needs a normalized distribution");
  if (n == 0) throw Error(ErrorCode::ParameterOutOfRange, "sample count must be positive");
  std::vector<double> cdf(g.size());
  double acc = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    acc += std::max(0.0, g[x]);
    cdf[x] = acc;
  }
  Rng rng(seed);
  std::vector<std::uint64_t> counts(g.size(), 0);
  for (std::uint64_t s = 0; s < n; ++s) {
    const double u = rng.uniform() * acc;
    // First atom whose cumulative mass exceeds u; it always has positive mass.
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++counts[std::min(static_cast<std::size_t>(it - cdf.begin()), g.size() - 1)];
  }
  return EmpiricalDistribution::from_counts(counts);
}

}  // namespace l1select
