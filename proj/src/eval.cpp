#include "semground/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "semground/error.hpp"
#include "semground/text.hpp"

namespace semground {

namespace {

const json& items_of(const json& j) {
  if (j.is_array()) return j;
  if (j.is_object() && j.contains("items") && j["items"].is_array()) return j["items"];
  throw Error(ErrorCode::MalformedFile, "fixture file must be a list or {\"items\": [...]}");
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::vector<ParseFixtureItem> parse_fixtures_from_json(const json& j) {
  const json& list = items_of(j);
  if (list.empty()) throw Error(ErrorCode::MalformedFile, "parse fixture file has no items");
  std::vector<ParseFixtureItem> out;
  try {
    for (const auto& e : list) {
      ParseFixtureItem item;
      item.prompt = e.at("prompt").get<std::string>();
      item.prompt_template = prompt_template_from_string(e.value("template", std::string("visual")));
      item.expected_action = operation_from_string(e.at("expected_action").get<std::string>());
      const auto& objs = e.at("expected_objects");
      if (objs.is_object()) {
        item.expected_detailed = objs.at("detailed").get<std::vector<std::string>>();
        item.expected_minimal = objs.at("minimal").get<std::vector<std::string>>();
      } else {
        item.expected_detailed = objs.get<std::vector<std::string>>();
        item.expected_minimal = item.expected_detailed;
      }
      out.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("parse fixture: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedFile, std::string("parse fixture: ") + e.what());
  }
  return out;
}

std::vector<ParseFixtureItem> load_parse_fixtures(const std::filesystem::path& path) {
  return parse_fixtures_from_json(read_json_file(path));
}

bool same_object_set(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  auto norm = [](const std::vector<std::string>& v) {
    std::set<std::string> s;
    for (const auto& x : v) s.insert(text::to_lower(text::trim(x)));
    return s;
  };
  return norm(a) == norm(b);
}

std::pair<double, double> mean_and_sample_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

ParseMetrics eval_parse(const std::vector<ParseFixtureItem>& items, const ParserConfig& config,
                        const Lexicon& lexicon, ChatTransport* transport) {
  if (items.empty()) throw Error(ErrorCode::InvalidArgument, "no fixture items to evaluate");
  ParseMetrics m;
  m.label = std::string(to_string(config.backend)) + "/" + std::string(to_string(config.mode));
  m.total = items.size();
  std::vector<double> latencies;
  for (const auto& item : items) {
    ParserConfig cfg = config;
    cfg.prompt_template = item.prompt_template;
    ParseRow row;
    row.prompt = item.prompt;
    try {
      const auto r = parse(item.prompt, cfg, lexicon, transport);
      row.got = r.spec;
      row.latency = r.latency;
      row.object_ok = same_object_set(r.spec.objects, item.expected_objects(config.mode));
      row.action_ok = r.spec.operation == item.expected_action;
      latencies.push_back(r.latency);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TransportError || e.code() == ErrorCode::FixtureMiss) throw;
      row.error = e.what();
    }
    m.object_correct += row.object_ok ? 1 : 0;
    m.action_correct += row.action_ok ? 1 : 0;
    m.rows.push_back(std::move(row));
  }
  std::tie(m.latency_mean, m.latency_std) = mean_and_sample_std(latencies);
  return m;
}

std::string format_parse_table(const std::vector<ParseMetrics>& runs) {
  std::ostringstream os;
  os << pad("Model", 20) << pad("Acc. (object)", 16) << pad("Acc. (action)", 16) << "Time (Sec.)\n";
  for (const auto& m : runs) {
    char t[64];
    std::snprintf(t, sizeof t, "%.2f ± %.2f", m.latency_mean, m.latency_std);
    os << pad(m.label, 20) << pad(percent(m.object_accuracy()), 16) << pad(percent(m.action_accuracy()), 16) << t
       << "\n";
  }
  return os.str();
}

json to_json(const ParseMetrics& m) {
  json rows = json::array();
  for (const auto& r : m.rows) {
    json row{{"prompt", r.prompt}, {"object_ok", r.object_ok}, {"action_ok", r.action_ok}, {"latency", r.latency}};
    if (r.got) row["got"] = *r.got;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  return json{{"label", m.label},
              {"total", m.total},
              {"object_correct", m.object_correct},
              {"action_correct", m.action_correct},
              {"object_accuracy", m.object_accuracy()},
              {"action_accuracy", m.action_accuracy()},
              {"latency_mean", m.latency_mean},
              {"latency_std", m.latency_std},
              {"rows", rows}};
}

std::vector<DetectFixtureItem> detect_fixtures_from_json(const json& j) {
  const json& list = items_of(j);
  if (list.empty()) throw Error(ErrorCode::MalformedFile, "detect fixture file has no items");
  std::vector<DetectFixtureItem> out;
  try {
    for (const auto& e : list) {
      DetectFixtureItem item;
      item.image_id = e.at("image_id").get<std::string>();
      item.width = e.at("width").get<std::size_t>();
      item.height = e.at("height").get<std::size_t>();
      const auto& objs = e.at("objects");
      if (objs.is_object()) {
        item.objects_detailed = objs.at("detailed").get<std::vector<std::string>>();
        item.objects_minimal = objs.at("minimal").get<std::vector<std::string>>();
      } else {
        item.objects_detailed = objs.get<std::vector<std::string>>();
        item.objects_minimal = item.objects_detailed;
      }
      for (const auto& b : e.at("labeled_boxes")) {
        const auto c = b.at("box").get<std::vector<std::int64_t>>();
        if (c.size() != 4) throw Error(ErrorCode::MalformedFile, "labeled box needs [x1, y1, x2, y2]");
        LabeledBox lb{b.value("label", std::string{}), PixelBox{c[0], c[1], c[2], c[3]}};
        if (lb.box.x1 < 0 || lb.box.y1 < 0 || lb.box.x2 <= lb.box.x1 || lb.box.y2 <= lb.box.y1 ||
            lb.box.x2 > static_cast<std::int64_t>(item.width) || lb.box.y2 > static_cast<std::int64_t>(item.height)) {
          throw Error(ErrorCode::MalformedFile, "labeled box outside image '" + item.image_id + "'");
        }
        item.labeled_boxes.push_back(lb);
      }
      if (item.width == 0 || item.height == 0 || item.labeled_boxes.empty()) {
        throw Error(ErrorCode::MalformedFile, "item '" + item.image_id + "' needs a size and labeled boxes");
      }
      out.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("detect fixture: ") + e.what());
  }
  return out;
}

std::vector<DetectFixtureItem> load_detect_fixtures(const std::filesystem::path& path) {
  return detect_fixtures_from_json(read_json_file(path));
}

bool localized(const Grounding& g, const std::vector<LabeledBox>& labeled, double iou_threshold) {
  return std::all_of(labeled.begin(), labeled.end(), [&](const LabeledBox& lb) {
    return std::any_of(g.regions.begin(), g.regions.end(), [&](const Region& r) {
      const auto* box = std::get_if<PixelBox>(&r.extent);
      return box && iou(*box, lb.box) >= iou_threshold;
    });
  });
}

DetectMetrics eval_detect(const std::vector<DetectFixtureItem>& items, DetectionService& service,
                          double iou_threshold) {
  if (items.empty()) throw Error(ErrorCode::InvalidArgument, "no fixture items to evaluate");
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw Error(ErrorCode::InvalidArgument, "IoU threshold must lie in (0,1]");
  DetectMetrics m;
  m.total = items.size();
  m.iou_threshold = iou_threshold;
  for (auto mode : {ParserMode::Detailed, ParserMode::Minimal}) {
    for (auto t : {Tightness::Tight, Tightness::Loose}) m.configs.push_back({mode, t, 0});
  }
  for (const auto& item : items) {
    InputSample x;
    x.kind = SampleKind::ImageGrayscale;
    x.shape = {item.height, item.width};
    x.values.assign(item.width * item.height, 0.0);
    x.id = item.image_id;
    std::vector<bool> row;
    for (auto& c : m.configs) {
      SemanticSpec spec;
      spec.objects = c.mode == ParserMode::Minimal ? item.objects_minimal : item.objects_detailed;
      spec.operation = Operation::Remove;
      spec.domain_hint = Domain::Image;
      bool ok = false;
      try {
        ok = localized(ground_image(spec, x, DetectorConfig::for_mode(c.tightness), service), item.labeled_boxes,
                       iou_threshold);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoDetections) throw;
      }
      c.successes += ok ? 1 : 0;
      row.push_back(ok);
    }
    if (std::find(row.begin(), row.end(), true) != row.end()) ++m.any_successes;
    m.outcomes.push_back(std::move(row));
  }
  return m;
}

std::string format_detect_table(const DetectMetrics& m) {
  std::ostringstream os;
  os << pad("Mode", 12) << pad("Tightness", 12) << "Acc.\n";
  for (const auto& c : m.configs) {
    os << pad(std::string(to_string(c.mode)), 12) << pad(std::string(to_string(c.tightness)), 12)
       << percent(m.accuracy(c.successes)) << "\n";
  }
  os << pad("any", 12) << pad("any", 12) << percent(m.accuracy(m.any_successes)) << "\n";
  return os.str();
}

json to_json(const DetectMetrics& m) {
  json configs = json::array();
  for (const auto& c : m.configs) {
    configs.push_back({{"mode", to_string(c.mode)},
                       {"tightness", to_string(c.tightness)},
                       {"successes", c.successes},
                       {"accuracy", m.accuracy(c.successes)}});
  }
  return json{{"total", m.total},
              {"iou_threshold", m.iou_threshold},
              {"configs", configs},
              {"any_successes", m.any_successes},
              {"any_accuracy", m.accuracy(m.any_successes)},
              {"outcomes", m.outcomes}};
}

}  // namespace semground
