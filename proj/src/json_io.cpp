#include "semground/json_io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "semground/error.hpp"

namespace semground {

void to_json(json& j, const RawBound& b) {
  j = json::object();
  j["lower"] = b.lower ? json(*b.lower) : json(nullptr);
  j["upper"] = b.upper ? json(*b.upper) : json(nullptr);
}

void from_json(const json& j, RawBound& b) {
  b = {};
  if (j.contains("lower") && !j["lower"].is_null()) b.lower = j["lower"].get<double>();
  if (j.contains("upper") && !j["upper"].is_null()) b.upper = j["upper"].get<double>();
}

void to_json(json& j, const SemanticSpec& s) {
  j = json{{"objects", s.objects},
           {"operation", to_string(s.operation)},
           {"domain_hint", to_string(s.domain_hint)}};
  if (s.bound) j["bound"] = *s.bound;
}

void from_json(const json& j, SemanticSpec& s) {
  s.objects = j.at("objects").get<std::vector<std::string>>();
  s.operation = operation_from_string(j.at("operation").get<std::string>());
  s.domain_hint = domain_from_string(j.at("domain_hint").get<std::string>());
  s.bound.reset();
  if (j.contains("bound") && !j["bound"].is_null()) s.bound = j["bound"].get<RawBound>();
  validate(s);
}

void to_json(json& j, const InputSample& x) {
  j = json{{"id", x.id}, {"kind", to_string(x.kind)}, {"shape", x.shape}, {"values", x.values}};
}

void from_json(const json& j, InputSample& x) {
  x.id = j.at("id").get<std::string>();
  x.kind = sample_kind_from_string(j.at("kind").get<std::string>());
  x.shape = j.at("shape").get<std::vector<std::size_t>>();
  x.values = j.at("values").get<std::vector<double>>();
  validate(x);
}

void to_json(json& j, const Region& r) {
  std::visit(
      [&j](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, FeatureRange>) {
          j = json{{"type", "feature_range"}, {"index", e.index}, {"lower", e.lower}, {"upper", e.upper}};
        } else if constexpr (std::is_same_v<T, PixelBox>) {
          j = json{{"type", "pixel_box"}, {"x1", e.x1}, {"y1", e.y1}, {"x2", e.x2}, {"y2", e.y2}};
        } else {
          j = json{{"type", "time_interval"}, {"t_start", e.t_start}, {"t_end", e.t_end}};
        }
      },
      r.extent);
  j["label"] = r.label;
  j["score"] = r.score;
}

void from_json(const json& j, Region& r) {
  const auto type = j.at("type").get<std::string>();
  if (type == "feature_range") {
    r.extent = FeatureRange{j.at("index").get<std::size_t>(), j.at("lower").get<double>(),
                            j.at("upper").get<double>()};
  } else if (type == "pixel_box") {
    r.extent = PixelBox{j.at("x1").get<std::int64_t>(), j.at("y1").get<std::int64_t>(),
                        j.at("x2").get<std::int64_t>(), j.at("y2").get<std::int64_t>()};
  } else if (type == "time_interval") {
    r.extent = TimeInterval{j.at("t_start").get<std::int64_t>(), j.at("t_end").get<std::int64_t>()};
  } else {
    throw Error(ErrorCode::MalformedFile, "unknown region type '" + type + "'");
  }
  r.label = j.value("label", std::string{});
  r.score = j.value("score", 1.0);
}

void to_json(json& j, const Grounding& g) {
  j = json{{"regions", g.regions}, {"source", to_string(g.source)}};
}

void from_json(const json& j, Grounding& g) {
  g.regions = j.at("regions").get<std::vector<Region>>();
  g.source = grounding_source_from_string(j.at("source").get<std::string>());
}

void to_json(json& j, const GroundedSpec& s) {
  j = json{{"lower", s.input_lower},
           {"upper", s.input_upper},
           {"target_class", s.target_class},
           {"reference", s.reference},
           {"provenance", {{"spec", s.provenance.spec}, {"grounding", s.provenance.grounding}}}};
}

void from_json(const json& j, GroundedSpec& s) {
  s.input_lower = j.at("lower").get<std::vector<double>>();
  s.input_upper = j.at("upper").get<std::vector<double>>();
  s.target_class = j.at("target_class").get<std::size_t>();
  s.reference = j.at("reference").get<InputSample>();
  const auto& p = j.at("provenance");
  s.provenance.spec = p.at("spec").get<SemanticSpec>();
  s.provenance.grounding = p.at("grounding").get<Grounding>();
  validate(s);
}

void to_json(json& j, const Verdict& v) {
  j = json{{"status", to_string(v.status)},
           {"counterexample", v.counterexample ? json(*v.counterexample) : json(nullptr)},
           {"nodes_explored", v.nodes_explored},
           {"wall_time", v.wall_time},
           {"reason", v.reason}};
}

void from_json(const json& j, Verdict& v) {
  v.status = verdict_status_from_string(j.at("status").get<std::string>());
  v.counterexample.reset();
  if (j.contains("counterexample") && !j["counterexample"].is_null()) {
    v.counterexample = j["counterexample"].get<std::vector<double>>();
  }
  v.nodes_explored = j.value("nodes_explored", std::uint64_t{0});
  v.wall_time = j.value("wall_time", 0.0);
  v.reason = j.value("reason", std::string{});
}

void rethrow_as_malformed(const std::string& what, const std::exception& e) {
  throw Error(ErrorCode::MalformedFile, what + ": " + e.what());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
  }
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw Error(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename into '" + path.string() + "': " + ec.message());
}

}  // namespace semground
