#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "semground/network.hpp"
#include "semground/types.hpp"

namespace semground {

struct BoundsBox {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const noexcept { return lower.size(); }
};

struct VerifierConfig {
  std::uint64_t max_nodes = 100000;
  double split_tolerance = 1e-6;
  double margin_tolerance = 1e-9;
  int pgd_steps = 50;
  int pgd_restarts = 5;
  int parallel_workers = 1;
  std::uint64_t seed = 0x5eed;
};

void validate(const VerifierConfig& cfg);

/// Interval bound propagation: affine layers map (center, radius) to
/// (W c + b, |W| r); ReLU clamps both ends at zero.
BoundsBox ibp_forward(const Network& net, const BoundsBox& box);

/// max over j != c of (upper[j] - lower[c]). Negative means no point in the
/// box can move the argmax away from c.
double violation_margin_bound(const BoundsBox& out, std::size_t target_class);

/// margin(y) = max_{j != c} (y_j - y_c).
double margin(std::span<const double> logits, std::size_t target_class);

struct MarginGradient {
  double value = 0.0;
  std::vector<double> gradient;  // d margin / d input under the active ReLU pattern
};

/// Exact margin and its gradient through the activation pattern at x. Where
/// several competitors tie, the lowest index is differentiated.
MarginGradient margin_with_gradient(const Network& net, std::span<const double> x,
                                    std::size_t target_class);

/// Projected sign-gradient ascent on the margin inside [lower, upper].
/// Returns the first point whose exact margin is > 0.
std::optional<std::vector<double>> find_counterexample(const Network& net, const GroundedSpec& spec,
                                                       const VerifierConfig& cfg);

/// Same search over an explicit box; `reference` seeds one restart.
std::optional<std::vector<double>> find_counterexample_in_box(const Network& net,
                                                              const BoundsBox& box,
                                                              std::span<const double> reference,
                                                              std::size_t target_class,
                                                              const VerifierConfig& cfg,
                                                              std::uint64_t seed);

/// Input-splitting branch-and-bound over the spec's box.
Verdict verify(const Network& net, const GroundedSpec& spec, const VerifierConfig& cfg = {});

/// Checks a counterexample by exact forward evaluation: inside the box and argmax != target.
bool recheck_counterexample(const Network& net, const GroundedSpec& spec,
                            std::span<const double> point);

}  // namespace semground
