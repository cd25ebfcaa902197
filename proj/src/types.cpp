#include "semground/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <utility>

#include "semground/error.hpp"

namespace semground {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NoActionFound: return "NoActionFound";
    case ErrorCode::NoObjectFound: return "NoObjectFound";
    case ErrorCode::ConflictingActions: return "ConflictingActions";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::UnsupportedAction: return "UnsupportedAction";
    case ErrorCode::FixtureMiss: return "FixtureMiss";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::AmbiguousAttribute: return "AmbiguousAttribute";
    case ErrorCode::NoDetections: return "NoDetections";
    case ErrorCode::UnsupportedOperation: return "UnsupportedOperation";
    case ErrorCode::RegionKindMismatch: return "RegionKindMismatch";
  }
  return "Unknown";
}

namespace {

constexpr std::array<std::pair<Operation, std::string_view>, 13> kOperationNames{{
    {Operation::Remove, "remove"},
    {Operation::AddNoise, "add_noise"},
    {Operation::IncreaseBrightness, "increase_brightness"},
    {Operation::DecreaseBrightness, "decrease_brightness"},
    {Operation::IncreaseContrast, "increase_contrast"},
    {Operation::DecreaseContrast, "decrease_contrast"},
    {Operation::Rotate, "rotate"},
    {Operation::ScaleUp, "scale_up"},
    {Operation::ScaleDown, "scale_down"},
    {Operation::Increase, "increase"},
    {Operation::Decrease, "decrease"},
    {Operation::Change, "change"},
    {Operation::Amplify, "amplify"},
}};

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::Tabular: return "tabular";
    case Domain::Image: return "image";
    case Domain::Audio: return "audio";
  }
  return "?";
}

Domain domain_from_string(std::string_view s) {
  if (s == "tabular") return Domain::Tabular;
  if (s == "image") return Domain::Image;
  if (s == "audio") return Domain::Audio;
  throw Error(ErrorCode::InvalidArgument, "unknown domain '" + std::string(s) + "'");
}

std::string_view to_string(Operation op) {
  for (const auto& [o, name] : kOperationNames) {
    if (o == op) return name;
  }
  return "?";
}

std::optional<Operation> try_operation_from_string(std::string_view s) {
  for (const auto& [o, name] : kOperationNames) {
    if (name == s) return o;
  }
  return std::nullopt;
}

Operation operation_from_string(std::string_view s) {
  if (auto op = try_operation_from_string(s)) return *op;
  throw Error(ErrorCode::UnsupportedAction, "action '" + std::string(s) + "' is not supported");
}

Domain domain_of(Operation op) {
  switch (op) {
    case Operation::Increase:
    case Operation::Decrease:
    case Operation::Change:
      return Domain::Tabular;
    case Operation::Amplify:
      return Domain::Audio;
    default:
      return Domain::Image;
  }
}

const std::vector<Operation>& operations_of(Domain d) {
  static const std::vector<Operation> image{
      Operation::Remove,           Operation::AddNoise,         Operation::IncreaseBrightness,
      Operation::DecreaseBrightness, Operation::IncreaseContrast, Operation::DecreaseContrast,
      Operation::Rotate,           Operation::ScaleUp,          Operation::ScaleDown};
  static const std::vector<Operation> tabular{Operation::Increase, Operation::Decrease,
                                              Operation::Change};
  static const std::vector<Operation> audio{Operation::Amplify};
  switch (d) {
    case Domain::Tabular: return tabular;
    case Domain::Audio: return audio;
    case Domain::Image: break;
  }
  return image;
}

void validate(const SemanticSpec& spec) {
  if (spec.objects.empty()) {
    throw Error(ErrorCode::InvalidArgument, "semantic spec has no objects");
  }
  for (const auto& o : spec.objects) {
    if (is_blank(o)) throw Error(ErrorCode::InvalidArgument, "semantic spec has a blank object");
  }
  if (domain_of(spec.operation) != spec.domain_hint) {
    throw Error(ErrorCode::InvalidArgument,
                "operation '" + std::string(to_string(spec.operation)) +
                    "' does not belong to domain '" + std::string(to_string(spec.domain_hint)) + "'");
  }
}

std::string_view to_string(SampleKind k) {
  switch (k) {
    case SampleKind::TabularVector: return "tabular_vector";
    case SampleKind::ImageGrayscale: return "image_grayscale";
    case SampleKind::AudioWaveform: return "audio_waveform";
  }
  return "?";
}

SampleKind sample_kind_from_string(std::string_view s) {
  if (s == "tabular_vector") return SampleKind::TabularVector;
  if (s == "image_grayscale") return SampleKind::ImageGrayscale;
  if (s == "audio_waveform") return SampleKind::AudioWaveform;
  throw Error(ErrorCode::InvalidArgument, "unknown sample kind '" + std::string(s) + "'");
}

Domain domain_of(SampleKind k) {
  switch (k) {
    case SampleKind::TabularVector: return Domain::Tabular;
    case SampleKind::ImageGrayscale: return Domain::Image;
    case SampleKind::AudioWaveform: return Domain::Audio;
  }
  return Domain::Tabular;
}

void validate(const InputSample& x) {
  const std::size_t expected_rank = x.kind == SampleKind::ImageGrayscale ? 2 : 1;
  if (x.shape.size() != expected_rank) {
    throw Error(ErrorCode::InvalidArgument,
                "input '" + x.id + "' has shape rank " + std::to_string(x.shape.size()) +
                    ", expected " + std::to_string(expected_rank));
  }
  std::size_t n = 1;
  for (auto d : x.shape) n *= d;
  if (n != x.values.size() || n == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "input '" + x.id + "' shape product " + std::to_string(n) + " != " +
                    std::to_string(x.values.size()) + " values");
  }
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const double v = x.values[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "input '" + x.id + "' value " + std::to_string(i) + " outside [0,1]");
    }
  }
}

std::string_view to_string(GroundingSource s) {
  switch (s) {
    case GroundingSource::Schema: return "schema";
    case GroundingSource::Detector: return "detector";
    case GroundingSource::Fixture: return "fixture";
    case GroundingSource::UserEdited: return "user_edited";
  }
  return "?";
}

GroundingSource grounding_source_from_string(std::string_view s) {
  if (s == "schema") return GroundingSource::Schema;
  if (s == "detector") return GroundingSource::Detector;
  if (s == "fixture") return GroundingSource::Fixture;
  if (s == "user_edited") return GroundingSource::UserEdited;
  throw Error(ErrorCode::InvalidArgument, "unknown grounding source '" + std::string(s) + "'");
}

void validate(const Region& r, const InputSample& x) {
  if (!(r.score >= 0.0 && r.score <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "region '" + r.label + "' score outside [0,1]");
  }
  struct Visitor {
    const InputSample& x;
    const std::string& label;
    void operator()(const FeatureRange& f) const {
      if (x.kind != SampleKind::TabularVector) {
        throw Error(ErrorCode::RegionKindMismatch, "feature_range on a non-tabular input");
      }
      if (f.index >= x.size()) {
        throw Error(ErrorCode::InvalidArgument, "feature index out of range for '" + label + "'");
      }
      if (!(0.0 <= f.lower && f.lower <= f.upper && f.upper <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "feature range for '" + label + "' is not within [0,1]");
      }
    }
    void operator()(const PixelBox& b) const {
      if (x.kind != SampleKind::ImageGrayscale) {
        throw Error(ErrorCode::RegionKindMismatch, "pixel_box on a non-image input");
      }
      const auto w = static_cast<std::int64_t>(x.width());
      const auto h = static_cast<std::int64_t>(x.height());
      if (!(0 <= b.x1 && b.x1 < b.x2 && b.x2 <= w && 0 <= b.y1 && b.y1 < b.y2 && b.y2 <= h)) {
        throw Error(ErrorCode::InvalidArgument, "pixel box for '" + label + "' outside image bounds");
      }
    }
    void operator()(const TimeInterval& t) const {
      if (x.kind != SampleKind::AudioWaveform) {
        throw Error(ErrorCode::RegionKindMismatch, "time_interval on a non-audio input");
      }
      const auto n = static_cast<std::int64_t>(x.size());
      if (!(0 <= t.t_start && t.t_start < t.t_end && t.t_end <= n)) {
        throw Error(ErrorCode::InvalidArgument, "time interval for '" + label + "' outside waveform");
      }
    }
  };
  std::visit(Visitor{x, r.label}, r.extent);
}

void validate(const Grounding& g, const InputSample& x) {
  if (g.regions.empty()) throw Error(ErrorCode::InvalidArgument, "grounding has no regions");
  for (const auto& r : g.regions) validate(r, x);
}

void validate(const GroundedSpec& spec) {
  const std::size_t n = spec.reference.size();
  if (spec.input_lower.size() != n || spec.input_upper.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "grounded spec bounds do not match reference length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = spec.input_lower[i];
    const double hi = spec.input_upper[i];
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "grounded spec coordinate " + std::to_string(i) + " has invalid bounds");
    }
  }
}

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Safe: return "SAFE";
    case VerdictStatus::Unsafe: return "UNSAFE";
    case VerdictStatus::Unknown: return "UNKNOWN";
  }
  return "?";
}

VerdictStatus verdict_status_from_string(std::string_view s) {
  if (s == "SAFE") return VerdictStatus::Safe;
  if (s == "UNSAFE") return VerdictStatus::Unsafe;
  if (s == "UNKNOWN") return VerdictStatus::Unknown;
  throw Error(ErrorCode::InvalidArgument, "unknown verdict status '" + std::string(s) + "'");
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace semground
