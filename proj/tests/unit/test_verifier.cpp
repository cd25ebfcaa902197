#include <doctest.h>

#include <random>

#include "semground/error.hpp"
#include "semground/json_io.hpp"
#include "semground/verifier.hpp"
#include "support/oracles.hpp"

using namespace semground;

namespace {

// bounds are widened outward by round-off slack, never by more than this
constexpr double kSlack = 1e-14;

void check_encloses(const BoundsBox& b, const std::vector<double>& lo, const std::vector<double>& hi) {
  REQUIRE(b.lower.size() == lo.size());
  for (std::size_t j = 0; j < lo.size(); ++j) {
    CHECK(b.lower[j] <= lo[j]);
    CHECK(b.lower[j] >= lo[j] - kSlack);
    CHECK(b.upper[j] >= hi[j]);
    CHECK(b.upper[j] <= hi[j] + kSlack);
  }
}

Network net_x_one_minus_x() {
  // y = (x1, 1 - x1)
  return Network({DenseLayer{1, 2, {1, -1}, {0, 1}, Activation::None}});
}

GroundedSpec box_spec(std::vector<double> lo, std::vector<double> hi, std::vector<double> ref, std::size_t c) {
  GroundedSpec s;
  s.input_lower = std::move(lo);
  s.input_upper = std::move(hi);
  s.reference = InputSample{SampleKind::TabularVector, std::move(ref), {s.input_lower.size()}, "ref"};
  s.reference.shape = {s.reference.values.size()};
  s.target_class = c;
  return s;
}

}  // namespace

TEST_CASE("ibp on hand examples") {
  const Network id({DenseLayer{2, 2, {1, 0, 0, 1}, {0, 0}, Activation::None}});
  auto b = ibp_forward(id, {{0, 0}, {1, 1}});
  check_encloses(b, {0, 0}, {1, 1});

  const Network diff({DenseLayer{2, 1, {1, -1}, {0}, Activation::Relu}, DenseLayer{1, 1, {1}, {0}, Activation::None}});
  b = ibp_forward(diff, {{0, 0}, {1, 1}});
  check_encloses(b, {0}, {1});
  CHECK_THROWS_AS(ibp_forward(diff, {{0}, {1}}), Error);
}

TEST_CASE("ibp bounds contain sampled outputs of the toy fixture net") {
  const auto net = load_network(oracle::data("nets/toy_net.json"));
  const auto onet = oracle::load_net("nets/toy_net.json");
  const BoundsBox box{{0.1, 0.3}, {0.6, 0.9}};
  const auto b = ibp_forward(net, box);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100000; ++k) {
    const std::vector<double> x = {0.1 + 0.5 * u(rng), 0.3 + 0.6 * u(rng)};
    const auto y = oracle::forward(onet, x);
    for (std::size_t j = 0; j < y.size(); ++j) {
      REQUIRE(y[j] >= b.lower[j]);
      REQUIRE(y[j] <= b.upper[j]);
    }
  }
}

TEST_CASE("violation margin bound") {
  CHECK(violation_margin_bound({{2, 0}, {3, 1}}, 0) == -1.0);
  CHECK(violation_margin_bound({{0, 0}, {1, 1}}, 0) == 1.0);
  CHECK(violation_margin_bound({{0, 5, 0}, {1, 6, 2}}, 1) == -3.0);
}

TEST_CASE("margin and its gradient") {
  const std::vector<double> y = {1.0, 3.0, 2.0};
  CHECK(margin(y, 0) == 2.0);
  CHECK(margin(y, 1) == -1.0);
  const auto net = net_x_one_minus_x();
  const auto g = margin_with_gradient(net, std::vector<double>{0.2}, 0);
  CHECK(g.value == doctest::Approx(0.6));
  CHECK(g.gradient == std::vector<double>{-2.0});
}

TEST_CASE("counterexample search") {
  const auto net = net_x_one_minus_x();
  VerifierConfig cfg;
  const auto hit = find_counterexample(net, box_spec({0.0}, {1.0}, {0.9}, 0), cfg);
  REQUIRE(hit.has_value());
  CHECK((*hit)[0] < 0.5);
  CHECK_FALSE(find_counterexample(net, box_spec({0.6}, {1.0}, {0.8}, 0), cfg).has_value());

  // degenerate box: a counterexample exists iff the point is misclassified
  CHECK(find_counterexample(net, box_spec({0.3}, {0.3}, {0.3}, 0), cfg).has_value());
  CHECK_FALSE(find_counterexample(net, box_spec({0.7}, {0.7}, {0.7}, 0), cfg).has_value());
}

TEST_CASE("certified fixture spec yields no counterexample on any restart") {
  const auto net = load_network(oracle::data("nets/toy_net.json"));
  const auto onet = oracle::load_net("nets/toy_net.json");
  auto spec = load_json_as<GroundedSpec>(oracle::data("golden/toy_degenerate.spec.json"));
  spec.input_lower = {0.2, 0.7};
  spec.input_upper = {0.3, 0.8};
  // pre-certified by an exhaustive grid at 1e-3
  REQUIRE_FALSE(oracle::grid_search(onet, spec.input_lower, spec.input_upper, spec.target_class).violated);
  VerifierConfig cfg;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    CHECK_FALSE(find_counterexample(net, spec, cfg).has_value());
  }
  CHECK(verify(net, spec).status == VerdictStatus::Safe);
}

TEST_CASE("verify on the analytic one-input net") {
  const auto net = net_x_one_minus_x();
  auto v = verify(net, box_spec({0.6}, {1.0}, {0.8}, 0));
  CHECK(v.status == VerdictStatus::Safe);

  v = verify(net, box_spec({0.0}, {1.0}, {0.8}, 0));
  REQUIRE(v.status == VerdictStatus::Unsafe);
  REQUIRE(v.counterexample.has_value());
  CHECK((*v.counterexample)[0] < 0.5);
  CHECK(recheck_counterexample(net, box_spec({0.0}, {1.0}, {0.8}, 0), *v.counterexample));

  v = verify(net, box_spec({0.8}, {0.8}, {0.8}, 0));
  CHECK(v.status == VerdictStatus::Safe);
  CHECK(v.nodes_explored == 1);
}

TEST_CASE("recheck rejects points outside the box or with an unchanged argmax") {
  const auto net = net_x_one_minus_x();
  const auto spec = box_spec({0.0}, {1.0}, {0.8}, 0);
  CHECK(recheck_counterexample(net, spec, std::vector<double>{0.1}));
  CHECK_FALSE(recheck_counterexample(net, spec, std::vector<double>{0.9}));
  CHECK_FALSE(recheck_counterexample(net, spec, std::vector<double>{-0.1}));
}

TEST_CASE("node budget exhaustion gives UNKNOWN") {
  // safe but touching the boundary: margin 0 at x1 = 0.5
  const auto net = net_x_one_minus_x();
  VerifierConfig cfg;
  cfg.max_nodes = 3;
  const auto v = verify(net, box_spec({0.5}, {1.0}, {0.8}, 0), cfg);
  CHECK(v.status == VerdictStatus::Unknown);
  CHECK_FALSE(v.reason.empty());
}

TEST_CASE("parallel workers agree with the sequential search") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VerifierConfig par;
  par.parallel_workers = 3;
  for (int k = 0; k < 40; ++k) {
    const auto net = oracle::random_network(rng, 2, 2, 2, 6);
    const std::vector<double> ref = {u(rng), u(rng)};
    const auto c = oracle::argmax(oracle::forward(oracle::from_library(net), ref));
    const auto spec = box_spec({std::max(0.0, ref[0] - 0.2), std::max(0.0, ref[1] - 0.2)},
                               {std::min(1.0, ref[0] + 0.2), std::min(1.0, ref[1] + 0.2)}, ref, c);
    const auto a = verify(net, spec);
    const auto b = verify(net, spec, par);
    if (a.status != VerdictStatus::Unknown && b.status != VerdictStatus::Unknown) CHECK(a.status == b.status);
    if (b.counterexample) CHECK(recheck_counterexample(net, spec, *b.counterexample));
  }
}

TEST_CASE("verifier input errors") {
  const auto net = net_x_one_minus_x();
  CHECK_THROWS_AS(verify(net, box_spec({0.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}, 0)), Error);
  CHECK_THROWS_AS(verify(net, box_spec({0.0}, {1.0}, {0.5}, 2)), Error);
  VerifierConfig bad;
  bad.max_nodes = 0;
  CHECK_THROWS_AS(verify(net, box_spec({0.0}, {1.0}, {0.5}, 0), bad), Error);
}
