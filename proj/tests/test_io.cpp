#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <limits>

#include "l1select/generators.hpp"
#include "l1select/io.hpp"

using namespace l1select;
using namespace l1select::io;

namespace {

bool bit_equal(const Mass& a, const Mass& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::filesystem::path scratch(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "l1select_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("family and empirical files round-trip bit-exactly", "[io]") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng.next(), 1 + rng.below(8), 1 + rng.below(8), 0.2);
    const auto path = scratch("family.json").string();
    REQUIRE(write_json_file(path, family_to_json(inst.family)));
    const auto back = family_from_json(read_json_file(path));
    REQUIRE(back.size() == inst.family.size());
    CHECK(back.support().atoms() == inst.family.support().atoms());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].name == inst.family[i].name);
      CHECK(bit_equal(back.mass(i), inst.family.mass(i)));
    }
    const auto h = empirical_from_json(json::parse(empirical_to_json(inst.empirical).dump()), back.support());
    CHECK(bit_equal(h.mass(), inst.empirical.mass()));
    CHECK(bit_equal(truth_from_json(json::parse(truth_to_json(inst.truth).dump()), back.support()), inst.truth));
  }
}

TEST_CASE("awkward doubles survive text", "[io]") {
  const Mass v{0.1, 1.0 / 3, std::nextafter(0.2, 1.0), 5e-324, 1.0 - 0.1 - 1.0 / 3 - std::nextafter(0.2, 1.0)};
  const auto j = json::parse(json{{"truth", v}}.dump());
  CHECK(bit_equal(j.at("truth").get<Mass>(), v));
}

TEST_CASE("samples aggregate to counts / n", "[io]") {
  const Support s({"a", "b", "c"});
  const auto h = empirical_from_json(json::parse(R"({"samples": ["a", "c", "c", "a", "a"]})"), s);
  CHECK(h.mass() == Mass{0.6, 0.0, 0.4});
  REQUIRE(h.sample_count());
  CHECK(*h.sample_count() == 5);
  CHECK(empirical_to_json(h).at("sample_count") == 5);
}

TEST_CASE("malformed files are parse errors", "[io]") {
  const Support s({"a", "b"});
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Capacity;  // sentinel: nothing thrown
  };
  CHECK(code_of([] { (void)family_from_json(json::parse(R"({"support": ["a"]})")); }) == ErrorCode::Parse);
  CHECK(code_of([] {
          (void)family_from_json(json::parse(R"({"support": ["a", "b"], "candidates": [{"name": "f", "mass": [1]}]})"));
        }) == ErrorCode::Parse);
  CHECK(code_of([] {
          (void)family_from_json(json::parse(
              R"({"support": ["a", "b"], "candidates": [{"name": "f", "mass": [1, 0]}, {"name": "f", "mass": [0, 1]}]})"));
        }) == ErrorCode::Parse);
  CHECK(code_of([] { (void)family_from_json(json::parse(R"({"support": ["a", "a"], "candidates": []})")); }) ==
        ErrorCode::Parse);
  CHECK(code_of([&] { (void)empirical_from_json(json::parse(R"({"samples": ["z"]})"), s); }) == ErrorCode::Parse);
  CHECK(code_of([&] { (void)empirical_from_json(json::parse(R"({"mass": [0.5, 0.6]})"), s); }) == ErrorCode::Parse);
  CHECK(code_of([&] { (void)empirical_from_json(json::parse(R"({"mass": [1.0]})"), s); }) == ErrorCode::Parse);
  CHECK(code_of([&] { (void)truth_from_json(json::parse(R"({"truth": "x"})"), s); }) == ErrorCode::Parse);
  CHECK(code_of([] { (void)read_json_file("/nonexistent/file.json"); }) == ErrorCode::Parse);
  const auto bad = scratch("bad.json").string();
  REQUIRE(write_json_file(bad, json::object()));
  { std::ofstream(bad) << "{not json"; }
  CHECK(code_of([&] { (void)read_json_file(bad); }) == ErrorCode::Parse);
}

TEST_CASE("report serialization", "[io]") {
  SelectionReport r;
  r.algorithm = Algorithm::MinLossWeight;
  r.selected = 1;
  r.selected_name = "f2";
  r.h_products = 3;
  r.scores = {0.25, -std::numeric_limits<double>::infinity()};
  r.trace.push_back({0, 1, Outcome::Draw, std::size_t{1}});
  r.seed = 9;
  const auto j = report_to_json(r);
  CHECK(j.at("algorithm") == "minloss");
  CHECK(j.at("selected").at("name") == "f2");
  CHECK(j.at("scores")[1] == "-inf");
  CHECK(j.at("trace")[0].at("removed") == 1);
  CHECK(j.at("seed") == 9);
  CHECK_FALSE(j.contains("mixture"));
}
