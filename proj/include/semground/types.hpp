#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace semground {

enum class Domain { Tabular, Image, Audio };

enum class Operation {
  // image
  Remove,
  AddNoise,
  IncreaseBrightness,
  DecreaseBrightness,
  IncreaseContrast,
  DecreaseContrast,
  Rotate,
  ScaleUp,
  ScaleDown,
  // tabular
  Increase,
  Decrease,
  Change,
  // audio
  Amplify,
};

std::string_view to_string(Domain d);
std::string_view to_string(Operation op);
Domain domain_from_string(std::string_view s);
/// Throws UnsupportedAction for names outside the action vocabulary.
Operation operation_from_string(std::string_view s);
std::optional<Operation> try_operation_from_string(std::string_view s);
Domain domain_of(Operation op);
const std::vector<Operation>& operations_of(Domain d);

/// Relational bound on a tabular attribute in raw (unnormalized) units,
/// e.g. "younger than 50" -> upper = 50.
struct RawBound {
  std::optional<double> lower;
  std::optional<double> upper;

  bool operator==(const RawBound&) const = default;
};

struct SemanticSpec {
  std::vector<std::string> objects;
  Operation operation = Operation::Remove;
  Domain domain_hint = Domain::Image;
  std::optional<RawBound> bound;

  bool operator==(const SemanticSpec&) const = default;
};

/// Throws InvalidArgument when the objects list is empty, a phrase is blank,
/// or the operation does not belong to domain_hint.
void validate(const SemanticSpec& spec);

enum class SampleKind { TabularVector, ImageGrayscale, AudioWaveform };

std::string_view to_string(SampleKind k);
SampleKind sample_kind_from_string(std::string_view s);
Domain domain_of(SampleKind k);

struct InputSample {
  SampleKind kind = SampleKind::TabularVector;
  std::vector<double> values;
  std::vector<std::size_t> shape;
  std::string id;

  std::size_t size() const noexcept { return values.size(); }
  // image accessors; shape is [height, width]
  std::size_t height() const { return shape.at(0); }
  std::size_t width() const { return shape.at(1); }

  bool operator==(const InputSample&) const = default;
};

void validate(const InputSample& x);

struct FeatureRange {
  std::size_t index = 0;
  double lower = 0.0;
  double upper = 0.0;
  bool operator==(const FeatureRange&) const = default;
};

/// Inclusive-exclusive pixel rectangle: columns [x1, x2), rows [y1, y2).
struct PixelBox {
  std::int64_t x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  std::int64_t area() const noexcept { return (x2 - x1) * (y2 - y1); }
  /// Coordinate-wise containment (non-strict).
  bool contains(const PixelBox& o) const noexcept {
    return x1 <= o.x1 && y1 <= o.y1 && x2 >= o.x2 && y2 >= o.y2;
  }
  bool operator==(const PixelBox&) const = default;
};

/// Inclusive-exclusive sample range [t_start, t_end).
struct TimeInterval {
  std::int64_t t_start = 0, t_end = 0;
  bool operator==(const TimeInterval&) const = default;
};

using RegionExtent = std::variant<FeatureRange, PixelBox, TimeInterval>;

struct Region {
  RegionExtent extent;
  std::string label;
  double score = 1.0;

  bool operator==(const Region&) const = default;
};

enum class GroundingSource { Schema, Detector, Fixture, UserEdited };

std::string_view to_string(GroundingSource s);
GroundingSource grounding_source_from_string(std::string_view s);

struct Grounding {
  std::vector<Region> regions;
  GroundingSource source = GroundingSource::Schema;

  bool operator==(const Grounding&) const = default;
};

/// Checks region invariants and that every region fits inside x's shape.
void validate(const Region& r, const InputSample& x);
void validate(const Grounding& g, const InputSample& x);

struct Provenance {
  SemanticSpec spec;
  Grounding grounding;
  bool operator==(const Provenance&) const = default;
};

/// Box input constraint plus argmax invariance on target_class.
struct GroundedSpec {
  std::vector<double> input_lower;
  std::vector<double> input_upper;
  InputSample reference;
  std::size_t target_class = 0;
  Provenance provenance;

  std::size_t dim() const noexcept { return input_lower.size(); }
  bool operator==(const GroundedSpec&) const = default;
};

void validate(const GroundedSpec& spec);

enum class VerdictStatus { Safe, Unsafe, Unknown };

std::string_view to_string(VerdictStatus s);
VerdictStatus verdict_status_from_string(std::string_view s);

struct Verdict {
  VerdictStatus status = VerdictStatus::Unknown;
  std::optional<std::vector<double>> counterexample;
  std::uint64_t nodes_explored = 0;
  double wall_time = 0.0;
  std::string reason;
};

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(const std::vector<double>& v);

}  // namespace semground
