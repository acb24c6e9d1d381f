#pragma once

// JSON file formats.
//
//   family:    {"support": ["A1", ...], "candidates": [{"name": "f1", "mass": [...]}, ...]}
//   empirical: {"mass": [...]}  or  {"samples": ["A1", "A3", ...]}
//   truth:     {"truth": [...]}
//
// Doubles are written in shortest round-trip form, so write-then-read is
// bit-exact.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "l1select/density.hpp"
#include "l1select/selectors.hpp"

namespace l1select::io {

using nlohmann::json;

inline json family_to_json(const Family& family) {
  json j;
  j["support"] = family.support().atoms();
  j["candidates"] = json::array();
  for (const auto& c : family.members()) j["candidates"].push_back({{"name", c.name}, {"mass", c.mass}});
  return j;
}

inline Family family_from_json(const json& j) {
  try {
    Support support(j.at("support").get<std::vector<std::string>>());
    std::vector<Candidate> members;
    std::unordered_set<std::string> names;
    for (const auto& c : j.at("candidates")) {
      Candidate cand{c.at("name").get<std::string>(), c.at("mass").get<Mass>()};
      if (!names.insert(cand.name).second) throw Error(ErrorCode::Parse, "duplicate candidate name '" + cand.name + "'");
      if (cand.mass.size() != support.size()) {
        throw Error(ErrorCode::Parse, "candidate '" + cand.name + "' does not match the support length");
      }
      members.push_back(std::move(cand));
    }
    return Family(std::move(support), std::move(members));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("family file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    throw Error(ErrorCode::Parse, std::string("family file: ") + e.what());
  }
}

inline json empirical_to_json(const EmpiricalDistribution& h) {
  json j{{"mass", h.mass()}};
  if (h.sample_count()) j["sample_count"] = *h.sample_count();
  return j;
}

/// Samples are aggregated to counts / n against the support's labels.
inline EmpiricalDistribution empirical_from_json(const json& j, const Support& support) {
  try {
    if (j.contains("samples")) {
      std::vector<std::uint64_t> counts(support.size(), 0);
      for (const auto& s : j.at("samples")) {
        const auto label = s.get<std::string>();
        const auto x = support.find(label);
        if (!x) throw Error(ErrorCode::Parse, "sample '" + label + "' is not an atom of the support");
        ++counts[*x];
      }
      return EmpiricalDistribution::from_counts(counts);
    }
    auto mass = j.at("mass").get<Mass>();
    if (mass.size() != support.size()) throw Error(ErrorCode::Parse, "empirical mass does not match the support length");
    return EmpiricalDistribution::from_mass(std::move(mass));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("empirical file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    throw Error(ErrorCode::Parse, std::string("empirical file: ") + e.what());
  }
}

inline json truth_to_json(const Mass& g) { return json{{"truth", g}}; }

inline Mass truth_from_json(const json& j, const Support& support) {
  try {
    auto g = j.at("truth").get<Mass>();
    if (g.size() != support.size()) throw Error(ErrorCode::Parse, "truth vector does not match the support length");
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("truth file: ") + e.what());
  }
}

/// Non-finite scores (an undefeated loss-weight) become the strings "-inf"/"inf".
inline json number_or_tag(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v < 0 ? "-inf" : "inf";
}

inline json report_to_json(const SelectionReport& r) {
  json j;
  j["algorithm"] = std::string(algorithm_name(r.algorithm));
  j["selected"] = {{"index", r.selected}, {"name", r.selected_name}};
  j["h_products"] = r.h_products;
  j["term_evaluations"] = r.term_evaluations;
  if (!r.scores.empty()) {
    j["scores"] = json::array();
    for (double s : r.scores) j["scores"].push_back(number_or_tag(s));
  }
  if (!r.trace.empty()) {
    j["trace"] = json::array();
    for (const auto& e : r.trace) {
      json ev{{"pair", {e.first, e.second}}, {"outcome", outcome_name(e.outcome)}};
      if (e.removed) ev["removed"] = *e.removed;
      j["trace"].push_back(std::move(ev));
    }
  }
  if (r.seed) j["seed"] = *r.seed;
  if (r.mixture) j["mixture"] = {r.mixture->first, r.mixture->second};
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "'" + path + "': " + e.what());
  }
}

/// Returns false if the file cannot be written.
inline bool write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) return false;
  out << j.dump(2) << '\n';
  return static_cast<bool>(out);
}

}  // namespace l1select::io
