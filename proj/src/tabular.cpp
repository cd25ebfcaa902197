#include "semground/tabular.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "semground/error.hpp"
#include "semground/json_io.hpp"
#include "semground/text.hpp"

namespace semground {

DatasetSchema::DatasetSchema(std::string name, std::size_t input_dim, std::vector<AttributeDef> attributes)
    : name_(std::move(name)), input_dim_(input_dim), attributes_(std::move(attributes)) {
  std::set<std::size_t> seen;
  for (const auto& a : attributes_) {
    if (a.index >= input_dim_) {
      throw Error(ErrorCode::InvalidArgument, "attribute '" + a.name + "' index outside input_dim");
    }
    if (!seen.insert(a.index).second) {
      throw Error(ErrorCode::InvalidArgument, "attribute '" + a.name + "' reuses index " + std::to_string(a.index));
    }
    if (!(a.raw_min < a.raw_max)) {
      throw Error(ErrorCode::InvalidArgument, "attribute '" + a.name + "' needs raw_min < raw_max");
    }
  }
}

const AttributeDef& DatasetSchema::resolve(const std::string& object) const {
  const std::string key = text::to_lower(text::trim(object));
  for (const auto& a : attributes_) {
    if (text::to_lower(a.name) == key) return a;
  }
  std::vector<const AttributeDef*> hits;
  for (const auto& a : attributes_) {
    if (!key.empty() && text::contains_phrase(text::to_lower(a.description), key)) hits.push_back(&a);
  }
  if (hits.empty()) throw Error(ErrorCode::UnknownAttribute, "'" + object + "' matches no attribute");
  if (hits.size() > 1) {
    std::string names;
    for (const auto* h : hits) names += (names.empty() ? "" : ", ") + h->name;
    throw Error(ErrorCode::AmbiguousAttribute, "'" + object + "' matches " + names);
  }
  return *hits.front();
}

DatasetSchema schema_from_json_text(const std::string& text) {
  try {
    const auto j = json::parse(text);
    std::vector<AttributeDef> attrs;
    for (const auto& ja : j.at("attributes")) {
      AttributeDef a;
      a.name = ja.at("name").get<std::string>();
      a.description = ja.value("description", std::string{});
      a.index = ja.at("index").get<std::size_t>();
      a.raw_min = ja.at("raw_min").get<double>();
      a.raw_max = ja.at("raw_max").get<double>();
      a.aliases = ja.value("aliases", std::vector<std::string>{});
      attrs.push_back(std::move(a));
    }
    return DatasetSchema(j.value("name", std::string{}), j.at("input_dim").get<std::size_t>(), std::move(attrs));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("schema: ") + e.what());
  }
}

DatasetSchema load_schema(const std::filesystem::path& path) {
  return schema_from_json_text(read_text_file(path));
}

Grounding ground_tabular(const SemanticSpec& spec, const InputSample& x, const DatasetSchema& schema,
                         const TabularOptions& opts) {
  validate(spec);
  validate(x);
  if (spec.domain_hint != Domain::Tabular || x.kind != SampleKind::TabularVector) {
    throw Error(ErrorCode::InvalidArgument, "ground_tabular needs a tabular spec and a tabular input");
  }
  if (x.size() != schema.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                  " features, schema declares " + std::to_string(schema.input_dim()));
  }
  if (!(opts.delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be >= 0");

  const std::optional<RawBound> bound = opts.range_override ? opts.range_override : spec.bound;
  Grounding g;
  g.source = GroundingSource::Schema;
  for (const auto& object : spec.objects) {
    const auto& attr = schema.resolve(object);
    const double v = x.values[attr.index];
    double lo = v, hi = v;
    if (bound) {
      if (bound->lower && bound->upper && *bound->lower > *bound->upper) {
        throw Error(ErrorCode::InvalidArgument, "bound lower exceeds upper for '" + attr.name + "'");
      }
      lo = bound->lower ? attr.normalize(*bound->lower) : 0.0;
      hi = bound->upper ? attr.normalize(*bound->upper) : 1.0;
      lo = std::clamp(lo, 0.0, 1.0);
      hi = std::clamp(hi, 0.0, 1.0);
    } else {
      switch (spec.operation) {
        case Operation::Increase:
          hi = std::min(1.0, v + opts.delta);
          break;
        case Operation::Decrease:
          lo = std::max(0.0, v - opts.delta);
          break;
        case Operation::Change:
          lo = std::max(0.0, v - opts.delta);
          hi = std::min(1.0, v + opts.delta);
          break;
        default:
          throw Error(ErrorCode::UnsupportedOperation, "not a tabular action");
      }
    }
    g.regions.push_back(Region{FeatureRange{attr.index, lo, hi}, attr.name, 1.0});
  }
  validate(g, x);
  return g;
}

}  // namespace semground
