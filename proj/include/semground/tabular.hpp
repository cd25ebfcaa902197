#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semground/types.hpp"

namespace semground {

struct AttributeDef {
  std::string name;         // e.g. "Attribute13"
  std::string description;  // e.g. "Age (years)"
  std::size_t index = 0;    // input coordinate
  double raw_min = 0.0;
  double raw_max = 1.0;
  /// Trigger words the rule parser uses to recognise this attribute in free text.
  std::vector<std::string> aliases;

  double normalize(double raw) const { return (raw - raw_min) / (raw_max - raw_min); }
};

class DatasetSchema {
 public:
  DatasetSchema() = default;
  /// Validates distinct indices below input_dim and raw_min < raw_max.
  DatasetSchema(std::string name, std::size_t input_dim, std::vector<AttributeDef> attributes);

  const std::string& name() const noexcept { return name_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  const std::vector<AttributeDef>& attributes() const noexcept { return attributes_; }

  /// Exact name first, then case-insensitive description substring.
  /// Throws UnknownAttribute / AmbiguousAttribute.
  const AttributeDef& resolve(const std::string& object) const;

 private:
  std::string name_;
  std::size_t input_dim_ = 0;
  std::vector<AttributeDef> attributes_;
};

DatasetSchema schema_from_json_text(const std::string& text);
DatasetSchema load_schema(const std::filesystem::path& path);

struct TabularOptions {
  double delta = 0.1;
  /// Overrides any bound carried by the semantic spec.
  std::optional<RawBound> range_override;
};

/// One feature_range region per object. With a raw bound the range is the
/// normalized bound clipped to [0,1]; otherwise increase/decrease/change open
/// a window of width delta on the corresponding side of the current value.
Grounding ground_tabular(const SemanticSpec& spec, const InputSample& x, const DatasetSchema& schema,
                         const TabularOptions& opts = {});

}  // namespace semground
