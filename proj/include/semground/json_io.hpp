#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "semground/types.hpp"

namespace semground {

using json = nlohmann::json;

void to_json(json& j, const RawBound& b);
void from_json(const json& j, RawBound& b);
void to_json(json& j, const SemanticSpec& s);
void from_json(const json& j, SemanticSpec& s);
void to_json(json& j, const InputSample& x);
void from_json(const json& j, InputSample& x);
void to_json(json& j, const Region& r);
void from_json(const json& j, Region& r);
void to_json(json& j, const Grounding& g);
void from_json(const json& j, Grounding& g);
void to_json(json& j, const GroundedSpec& s);
void from_json(const json& j, GroundedSpec& s);
void to_json(json& j, const Verdict& v);
void from_json(const json& j, Verdict& v);

/// Reads and parses a JSON document, mapping failures to MalformedFile / Io.
json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& text);

[[noreturn]] void rethrow_as_malformed(const std::string& what, const std::exception& e);

template <typename T>
T load_json_as(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    rethrow_as_malformed(path.string(), e);
  }
}

}  // namespace semground
