#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "semground/network.hpp"
#include "semground/types.hpp"

namespace semground {

/// Magnitudes for the perturbation envelopes. All values are in normalized units.
struct OpParams {
  double epsilon = 0.05;  // add_noise half-width
  double beta = 0.1;      // brightness shift
  /// Contrast factor; unset means 1.5 for increase_contrast and 0.5 for decrease_contrast.
  std::optional<double> contrast_factor;
  double gain = 2.0;        // amplify
  double mask_value = 0.0;  // remove
  /// When set, `remove` frees the region to [0,1] instead of fixing it to mask_value.
  bool remove_free = false;
};

void validate(const OpParams& p);

/// Builds the input box and argmax-invariance constraint. Coordinates outside
/// every region stay fixed at the reference value. `target_class` is the
/// network's prediction on the reference input.
GroundedSpec generate(const InputSample& x, const Grounding& g, const SemanticSpec& spec,
                      const OpParams& params, std::size_t target_class);

/// Convenience overload that takes the target class from forward(net, x).
GroundedSpec generate(const InputSample& x, const Grounding& g, const SemanticSpec& spec,
                      const OpParams& params, const Network& net);

/// VNN-LIB query whose UNSAT answer means SAFE: input bounds per coordinate plus
/// the negated argmax property as a single disjunction.
std::string emit_vnnlib(const GroundedSpec& spec, const Network& net);

/// Fixed-notation decimal with 17 significant digits.
std::string format_vnnlib_number(double v);

}  // namespace semground
