#include "semground/spec_generator.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <vector>

#include "semground/error.hpp"

namespace semground {

void validate(const OpParams& p) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(p.epsilon >= 0.0)) bad("epsilon must be >= 0");
  if (!(p.beta >= 0.0)) bad("beta must be >= 0");
  if (!(p.gain >= 1.0)) bad("gain must be >= 1");
  if (!(p.mask_value >= 0.0 && p.mask_value <= 1.0)) bad("mask value must lie in [0,1]");
  if (p.contrast_factor && !(*p.contrast_factor > 0.0)) bad("contrast factor must be > 0");
}

namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

/// Flat input coordinates covered by a region.
std::vector<std::size_t> covered_indices(const Region& r, const InputSample& x) {
  std::vector<std::size_t> idx;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, FeatureRange>) {
          idx.push_back(e.index);
        } else if constexpr (std::is_same_v<T, PixelBox>) {
          const std::size_t w = x.width();
          for (auto row = e.y1; row < e.y2; ++row) {
            for (auto col = e.x1; col < e.x2; ++col) {
              idx.push_back(static_cast<std::size_t>(row) * w + static_cast<std::size_t>(col));
            }
          }
        } else {
          for (auto t = e.t_start; t < e.t_end; ++t) idx.push_back(static_cast<std::size_t>(t));
        }
      },
      r.extent);
  return idx;
}

struct Interval {
  double lo, hi;
};

Interval ordered(double a, double b) {
  const double lo = clip01(std::min(a, b));
  const double hi = clip01(std::max(a, b));
  return {lo, hi};
}

double contrast_factor_for(const SemanticSpec& spec, const OpParams& p) {
  if (spec.operation == Operation::IncreaseContrast) {
    const double k = p.contrast_factor.value_or(1.5);
    if (k < 1.0) throw Error(ErrorCode::InvalidArgument, "increase_contrast needs a factor >= 1");
    return k;
  }
  const double k = p.contrast_factor.value_or(0.5);
  if (!(k > 0.0 && k <= 1.0)) throw Error(ErrorCode::InvalidArgument, "decrease_contrast needs a factor in (0,1]");
  return k;
}

}  // namespace

GroundedSpec generate(const InputSample& x, const Grounding& g, const SemanticSpec& spec,
                      const OpParams& params, std::size_t target_class) {
  validate(x);
  validate(spec);
  validate(params);
  switch (spec.operation) {
    case Operation::Rotate:
    case Operation::ScaleUp:
    case Operation::ScaleDown:
      throw Error(ErrorCode::UnsupportedOperation,
                  "'" + std::string(to_string(spec.operation)) + "' has no box encoding");
    default:
      break;
  }
  if (domain_of(spec.operation) != domain_of(x.kind)) {
    throw Error(ErrorCode::UnsupportedOperation,
                "'" + std::string(to_string(spec.operation)) + "' is not defined for " +
                    std::string(to_string(x.kind)) + " inputs");
  }
  validate(g, x);

  const std::size_t n = x.size();
  GroundedSpec out;
  out.input_lower = x.values;
  out.input_upper = x.values;
  out.reference = x;
  out.target_class = target_class;
  out.provenance = {spec, g};

  std::vector<bool> touched(n, false);
  auto widen = [&](std::size_t i, Interval iv) {
    if (!touched[i]) {
      out.input_lower[i] = iv.lo;
      out.input_upper[i] = iv.hi;
      touched[i] = true;
    } else {
      out.input_lower[i] = std::min(out.input_lower[i], iv.lo);
      out.input_upper[i] = std::max(out.input_upper[i], iv.hi);
    }
  };

  for (const auto& region : g.regions) {
    if (const auto* f = std::get_if<FeatureRange>(&region.extent)) {
      widen(f->index, {clip01(f->lower), clip01(f->upper)});
      continue;
    }
    const auto idx = covered_indices(region, x);
    double mu = 0.0;
    if (spec.operation == Operation::IncreaseContrast || spec.operation == Operation::DecreaseContrast) {
      for (auto i : idx) mu += x.values[i];
      mu /= static_cast<double>(idx.size());
    }
    for (auto i : idx) {
      const double v = x.values[i];
      switch (spec.operation) {
        case Operation::Remove:
          widen(i, params.remove_free ? Interval{0.0, 1.0} : Interval{params.mask_value, params.mask_value});
          break;
        case Operation::AddNoise:
          widen(i, ordered(v - params.epsilon, v + params.epsilon));
          break;
        case Operation::IncreaseBrightness:
          widen(i, ordered(v, v + params.beta));
          break;
        case Operation::DecreaseBrightness:
          widen(i, ordered(v - params.beta, v));
          break;
        case Operation::IncreaseContrast:
        case Operation::DecreaseContrast: {
          const double k = contrast_factor_for(spec, params);
          widen(i, ordered(mu + (v - mu), mu + k * (v - mu)));
          break;
        }
        case Operation::Amplify:
          widen(i, ordered(v, clip01(params.gain * v)));
          break;
        default:
          throw Error(ErrorCode::RegionKindMismatch,
                      "'" + std::string(to_string(spec.operation)) + "' cannot act on a " +
                          (std::holds_alternative<PixelBox>(region.extent) ? "pixel box" : "time interval"));
      }
    }
  }
  validate(out);
  return out;
}

GroundedSpec generate(const InputSample& x, const Grounding& g, const SemanticSpec& spec,
                      const OpParams& params, const Network& net) {
  return generate(x, g, spec, params, argmax(net.forward(x.values)));
}

std::string format_vnnlib_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char sci[64];
  std::snprintf(sci, sizeof sci, "%.16e", v);
  const char* e = std::strchr(sci, 'e');
  const int exponent = e ? std::atoi(e + 1) : 0;
  const int decimals = std::max(1, 16 - exponent);
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string emit_vnnlib(const GroundedSpec& spec, const Network& net) {
  const std::size_t n = spec.dim();
  const std::size_t m = net.output_dim();
  if (n != net.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "emit_vnnlib: spec has " + std::to_string(n) +
                                                  " inputs, network expects " + std::to_string(net.input_dim()));
  }
  if (m < 2 || spec.target_class >= m) {
    throw Error(ErrorCode::DimensionMismatch, "emit_vnnlib: target class outside network outputs");
  }
  std::ostringstream os;
  os << "; grounded local robustness query\n";
  os << "; reference: " << spec.reference.id << "\n";
  os << "; target class: " << spec.target_class << "\n\n";
  for (std::size_t i = 0; i < n; ++i) os << "(declare-const X_" << i << " Real)\n";
  os << "\n";
  for (std::size_t j = 0; j < m; ++j) os << "(declare-const Y_" << j << " Real)\n";
  os << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    os << "(assert (and (>= X_" << i << " " << format_vnnlib_number(spec.input_lower[i]) << ") (<= X_" << i
       << " " << format_vnnlib_number(spec.input_upper[i]) << ")))\n";
  }
  os << "\n(assert (or";
  for (std::size_t j = 0; j < m; ++j) {
    if (j == spec.target_class) continue;
    os << " (>= Y_" << j << " Y_" << spec.target_class << ")";
  }
  os << "))\n";
  return os.str();
}

}  // namespace semground
