#include <doctest.h>

#include <random>

#include "semground/error.hpp"
#include "semground/json_io.hpp"
#include "semground/types.hpp"
#include "support/oracles.hpp"

using namespace semground;

namespace {

InputSample image(std::size_t h, std::size_t w, double fill = 0.5) {
  return InputSample{SampleKind::ImageGrayscale, std::vector<double>(h * w, fill), {h, w}, "img"};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("operation names round-trip and belong to one domain") {
  for (auto d : {Domain::Tabular, Domain::Image, Domain::Audio}) {
    CHECK(domain_from_string(to_string(d)) == d);
    for (auto op : operations_of(d)) {
      CHECK(operation_from_string(to_string(op)) == op);
      CHECK(domain_of(op) == d);
    }
  }
  CHECK(operation_from_string("increase_brightness") == Operation::IncreaseBrightness);
  CHECK(code_of([] { operation_from_string("teleport"); }) == ErrorCode::UnsupportedAction);
  CHECK_FALSE(try_operation_from_string("teleport").has_value());
}

TEST_CASE("semantic spec validation") {
  SemanticSpec s{{"beak"}, Operation::Remove, Domain::Image, std::nullopt};
  CHECK_NOTHROW(validate(s));
  s.objects = {};
  CHECK(code_of([&] { validate(s); }) == ErrorCode::InvalidArgument);
  s.objects = {"  "};
  CHECK(code_of([&] { validate(s); }) == ErrorCode::InvalidArgument);
  s.objects = {"beak"};
  s.domain_hint = Domain::Tabular;
  CHECK(code_of([&] { validate(s); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("input samples must be normalized and match their shape") {
  auto x = image(2, 3);
  CHECK_NOTHROW(validate(x));
  x.values[1] = 1.5;
  CHECK(code_of([&] { validate(x); }) == ErrorCode::InvalidArgument);
  x = image(2, 3);
  x.shape = {3, 3};
  CHECK_THROWS_AS(validate(x), Error);
  InputSample t{SampleKind::TabularVector, {0.0, 1.0}, {2}, "t"};
  CHECK_NOTHROW(validate(t));
}

TEST_CASE("region validation against the input") {
  const auto x = image(4, 4);
  CHECK_NOTHROW(validate(Region{PixelBox{0, 0, 4, 4}, "all", 1.0}, x));
  CHECK_THROWS_AS(validate(Region{PixelBox{0, 0, 5, 4}, "wide", 1.0}, x), Error);
  CHECK_THROWS_AS(validate(Region{PixelBox{2, 2, 2, 3}, "empty", 1.0}, x), Error);
  CHECK_THROWS_AS(validate(Region{PixelBox{-1, 0, 2, 2}, "neg", 1.0}, x), Error);
  CHECK_THROWS_AS(validate(Region{PixelBox{0, 0, 2, 2}, "score", 1.5}, x), Error);
  CHECK_THROWS_AS(validate(Region{TimeInterval{0, 2}, "wrong kind", 1.0}, x), Error);

  InputSample t{SampleKind::TabularVector, {0.2, 0.4}, {2}, "t"};
  CHECK_NOTHROW(validate(Region{FeatureRange{1, 0.0, 0.5}, "a", 1.0}, t));
  CHECK_THROWS_AS(validate(Region{FeatureRange{2, 0.0, 0.5}, "a", 1.0}, t), Error);
  CHECK_THROWS_AS(validate(Region{FeatureRange{0, 0.6, 0.5}, "a", 1.0}, t), Error);
}

TEST_CASE("grounded spec validation") {
  GroundedSpec s;
  s.reference = InputSample{SampleKind::TabularVector, {0.5, 0.5}, {2}, "r"};
  s.input_lower = {0.0, 0.5};
  s.input_upper = {1.0, 0.5};
  CHECK_NOTHROW(validate(s));
  s.input_upper = {1.0};
  CHECK_THROWS_AS(validate(s), Error);
  s.input_upper = {1.0, 0.4};
  CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax({0.1, 0.7, 0.7}) == 1);
  CHECK(argmax({3.0}) == 0);
  CHECK(argmax({-1.0, -2.0}) == 0);
}

TEST_CASE("pixel box containment is non-strict and coordinate-wise") {
  const PixelBox a{0, 0, 10, 10}, b{2, 2, 5, 5}, c{5, 5, 15, 15};
  CHECK(a.contains(b));
  CHECK(a.contains(a));
  CHECK_FALSE(b.contains(a));
  CHECK_FALSE(a.contains(c));
  CHECK(a.area() == 100);
}

TEST_CASE("json round-trips for every shipped type") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double lo = u(rng), hi = lo + (1 - lo) * u(rng);
    const std::vector<Region> regions = {
        Region{FeatureRange{static_cast<std::size_t>(k % 7), lo, hi}, "f", u(rng)},
        Region{PixelBox{k % 3, k % 5, k % 3 + 1 + k % 4, k % 5 + 2}, "p", u(rng)},
        Region{TimeInterval{k, k + 3}, "t", u(rng)},
    };
    for (const auto& r : regions) CHECK(json(r).get<Region>() == r);
    const Grounding g{regions, static_cast<GroundingSource>(k % 4)};
    CHECK(json(g).get<Grounding>() == g);
  }

  SemanticSpec s{{"Attribute13"}, Operation::Change, Domain::Tabular, RawBound{std::nullopt, 50.0}};
  CHECK(json(s).get<SemanticSpec>() == s);
  s.bound.reset();
  CHECK(json(s).get<SemanticSpec>() == s);

  const auto spec = load_json_as<GroundedSpec>(oracle::data("golden/credit_age.spec.json"));
  CHECK(json(spec).get<GroundedSpec>() == spec);

  Verdict v;
  v.status = VerdictStatus::Unsafe;
  v.counterexample = std::vector<double>{0.25, 0.5};
  v.nodes_explored = 7;
  v.reason = "r";
  const auto back = json(v).get<Verdict>();
  CHECK(back.status == v.status);
  CHECK(back.counterexample == v.counterexample);
  CHECK(back.nodes_explored == 7);
}

TEST_CASE("region json uses a type tag") {
  const json j = Region{PixelBox{1, 2, 3, 4}, "beak", 0.5};
  CHECK(j["type"] == "pixel_box");
  CHECK(j["x1"] == 1);
  CHECK(j["y2"] == 4);
  CHECK_THROWS(json({{"type", "polygon"}}).get<Region>());
}

TEST_CASE("malformed files are reported as such") {
  const auto dir = std::filesystem::temp_directory_path() / "semground_types_test";
  std::filesystem::create_directories(dir);
  write_text_file_atomic(dir / "bad.json", "{not json");
  CHECK(code_of([&] { read_json_file(dir / "bad.json"); }) == ErrorCode::MalformedFile);
  write_text_file_atomic(dir / "shape.json", R"({"id": "x", "kind": "tabular_vector"})");
  CHECK(code_of([&] { load_json_as<InputSample>(dir / "shape.json"); }) == ErrorCode::MalformedFile);
  CHECK(code_of([&] { read_json_file(dir / "missing.json"); }) == ErrorCode::Io);
  std::filesystem::remove_all(dir);
}
