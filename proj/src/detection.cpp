#include "semground/detection.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>

#include "semground/error.hpp"
#include "semground/image_codec.hpp"
#include "semground/json_io.hpp"
#include "semground/text.hpp"

namespace semground {

std::string_view to_string(Tightness t) { return t == Tightness::Tight ? "tight" : "loose"; }

Tightness tightness_from_string(std::string_view s) {
  if (s == "tight") return Tightness::Tight;
  if (s == "loose") return Tightness::Loose;
  throw Error(ErrorCode::InvalidArgument, "unknown tightness '" + std::string(s) + "'");
}

DetectorConfig DetectorConfig::for_mode(Tightness mode) {
  DetectorConfig cfg;
  cfg.mode = mode;
  if (mode == Tightness::Loose) {
    cfg.box_threshold = 0.15;
    cfg.text_threshold = 0.15;
  } else {
    cfg.box_threshold = 0.35;
    cfg.text_threshold = 0.25;
  }
  return cfg;
}

void validate(const DetectorConfig& cfg) {
  auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_open_unit(cfg.box_threshold) || !in_open_unit(cfg.text_threshold)) {
    throw Error(ErrorCode::InvalidArgument, "detector thresholds must lie in (0,1)");
  }
}

namespace {

RawDetection raw_detection_from_json(const json& j) {
  RawDetection d;
  d.cx = j.at("cx").get<double>();
  d.cy = j.at("cy").get<double>();
  d.w = j.at("w").get<double>();
  d.h = j.at("h").get<double>();
  d.box_score = j.at("box_score").get<double>();
  d.text_score = j.at("text_score").get<double>();
  d.phrase = j.value("phrase", std::string{});
  return d;
}

std::vector<RawDetection> raw_list_from_json(const json& j) {
  const json& list = j.is_object() ? j.at("detections") : j;
  std::vector<RawDetection> out;
  for (const auto& d : list) out.push_back(raw_detection_from_json(d));
  return out;
}

std::pair<std::int64_t, std::int64_t> span_to_pixels(double center, double extent, std::size_t size) {
  constexpr double kSlack = 1e-9;
  const auto n = static_cast<std::int64_t>(size);
  auto lo = static_cast<std::int64_t>(std::floor((center - 0.5 * extent) * static_cast<double>(size) + kSlack));
  auto hi = static_cast<std::int64_t>(std::ceil((center + 0.5 * extent) * static_cast<double>(size) - kSlack));
  lo = std::clamp<std::int64_t>(lo, 0, n);
  hi = std::clamp<std::int64_t>(hi, 0, n);
  if (hi <= lo) {
    if (lo >= n) lo = n - 1;
    hi = lo + 1;
  }
  return {lo, hi};
}

}  // namespace

std::vector<RawDetection> raw_detections_from_json(const std::string& body) {
  try {
    return raw_list_from_json(json::parse(body));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("detection response: ") + e.what());
  }
}

FixtureDetectionService FixtureDetectionService::load(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  if (!j.is_object()) throw Error(ErrorCode::MalformedFile, path.string() + ": expected a JSON object");
  std::map<std::string, std::vector<RawDetection>> table;
  try {
    for (const auto& [key, value] : j.items()) table.emplace(key, raw_list_from_json(value));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
  }
  return FixtureDetectionService(std::move(table));
}

std::vector<RawDetection> FixtureDetectionService::query(const InputSample& image, const std::string& query,
                                                         const DetectorConfig& cfg) {
  const std::string base = image.id + "|" + query;
  if (auto it = table_.find(base + "|" + std::string(to_string(cfg.mode))); it != table_.end()) return it->second;
  if (auto it = table_.find(base); it != table_.end()) return it->second;
  throw Error(ErrorCode::FixtureMiss, "no recorded detections for '" + base + "'");
}

std::vector<RawDetection> HttpDetectionService::query(const InputSample& image, const std::string& query,
                                                      const DetectorConfig& cfg) {
  const auto& url = cfg.endpoint.empty() ? endpoint_ : cfg.endpoint;
  if (url.empty()) throw Error(ErrorCode::InvalidArgument, "detector endpoint not configured");
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  const auto secs = static_cast<time_t>(timeout_);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  const json body{{"image", text::base64_encode(encode_png_grayscale(image))},
                  {"query", query},
                  {"box_threshold", cfg.box_threshold},
                  {"text_threshold", cfg.text_threshold}};
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw Error(ErrorCode::TransportError, "detector request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error(ErrorCode::TransportError, "detector returned HTTP " + std::to_string(res->status));
  return raw_detections_from_json(res->body);
}

std::string detection_query(const std::vector<std::string>& objects) { return text::join(objects, " . "); }

PixelBox to_pixel_box(const RawDetection& d, std::size_t width, std::size_t height) {
  const auto [x1, x2] = span_to_pixels(d.cx, d.w, width);
  const auto [y1, y2] = span_to_pixels(d.cy, d.h, height);
  return PixelBox{x1, y1, x2, y2};
}

std::vector<Detection> threshold_detections(const std::vector<RawDetection>& raw, const DetectorConfig& cfg,
                                            std::size_t width, std::size_t height) {
  std::vector<Detection> out;
  for (const auto& d : raw) {
    if (d.box_score >= cfg.box_threshold && d.text_score >= cfg.text_threshold) {
      out.push_back(Detection{to_pixel_box(d, width, height), d.phrase, d.box_score, d.text_score});
    }
  }
  return out;
}

std::vector<Detection> detect(const InputSample& x, const std::vector<std::string>& objects,
                              const DetectorConfig& cfg, DetectionService& service) {
  validate(cfg);
  if (x.kind != SampleKind::ImageGrayscale) throw Error(ErrorCode::InvalidArgument, "detect needs an image input");
  if (objects.empty()) throw Error(ErrorCode::InvalidArgument, "detect needs at least one object phrase");
  const auto query = detection_query(objects);
  auto dets = threshold_detections(service.query(x, query, cfg), cfg, x.width(), x.height());
  if (dets.empty()) {
    throw Error(ErrorCode::NoDetections, "no detection for '" + query + "' on '" + x.id + "' passes the " +
                                             std::string(to_string(cfg.mode)) + " thresholds");
  }
  return dets;
}

std::vector<Detection> prune_containing(const std::vector<Detection>& dets) {
  std::vector<Detection> unique;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < dets.size() && keep; ++j) {
      if (i == j || !(dets[j].box == dets[i].box)) continue;
      // among equal boxes the highest score wins, earliest on ties
      keep = dets[i].box_score > dets[j].box_score || (dets[i].box_score == dets[j].box_score && i < j);
    }
    if (keep) unique.push_back(dets[i]);
  }
  std::vector<Detection> out;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    bool contains_other = false;
    for (std::size_t j = 0; j < unique.size() && !contains_other; ++j) {
      contains_other = i != j && unique[i].box.contains(unique[j].box);
    }
    if (!contains_other) out.push_back(unique[i]);
  }
  return out;
}

Grounding ground_image(const SemanticSpec& spec, const InputSample& x, const DetectorConfig& cfg,
                       DetectionService& service) {
  validate(spec);
  auto dets = detect(x, spec.objects, cfg, service);
  if (cfg.mode == Tightness::Loose) dets = prune_containing(dets);
  Grounding g;
  g.source = GroundingSource::Detector;
  for (const auto& d : dets) {
    g.regions.push_back(Region{d.box, d.phrase, std::clamp(d.box_score, 0.0, 1.0)});
  }
  validate(g, x);
  return g;
}

double iou(const PixelBox& a, const PixelBox& b) {
  const auto ix = std::max<std::int64_t>(0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const auto iy = std::max<std::int64_t>(0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = static_cast<double>(ix * iy);
  const double uni = static_cast<double>(a.area() + b.area()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

AudioIntervalFixture AudioIntervalFixture::load(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  std::map<std::string, std::vector<Region>> table;
  try {
    for (const auto& [key, value] : j.items()) {
      std::vector<Region> regions;
      for (const auto& r : value.at("intervals")) {
        regions.push_back(Region{TimeInterval{r.at("t_start").get<std::int64_t>(), r.at("t_end").get<std::int64_t>()},
                                 r.value("label", std::string{}), r.value("score", 1.0)});
      }
      table.emplace(key, std::move(regions));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
  }
  return AudioIntervalFixture(std::move(table));
}

Grounding AudioIntervalFixture::ground(const SemanticSpec& spec, const InputSample& x) const {
  validate(spec);
  if (x.kind != SampleKind::AudioWaveform) throw Error(ErrorCode::InvalidArgument, "audio grounding needs a waveform");
  const auto key = x.id + "|" + detection_query(spec.objects);
  const auto it = table_.find(key);
  if (it == table_.end() || it->second.empty()) {
    throw Error(ErrorCode::NoDetections, "no recorded sound events for '" + key + "'");
  }
  Grounding g{it->second, GroundingSource::Fixture};
  validate(g, x);
  return g;
}

}  // namespace semground
