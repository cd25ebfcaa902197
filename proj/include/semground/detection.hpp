#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "semground/types.hpp"

namespace semground {

enum class Tightness { Tight, Loose };

std::string_view to_string(Tightness t);
Tightness tightness_from_string(std::string_view s);

struct DetectorConfig {
  Tightness mode = Tightness::Tight;
  double box_threshold = 0.35;
  double text_threshold = 0.25;
  std::string endpoint;  // service URL; unused with a fixture service

  /// Tight: 0.35 / 0.25. Loose: 0.15 / 0.15.
  static DetectorConfig for_mode(Tightness mode);
};

void validate(const DetectorConfig& cfg);

/// One detection as it travels on the wire: normalized center-format box.
struct RawDetection {
  double cx = 0.0, cy = 0.0, w = 0.0, h = 0.0;
  double box_score = 0.0;
  double text_score = 0.0;
  std::string phrase;
};

struct Detection {
  PixelBox box;
  std::string phrase;
  double box_score = 0.0;
  double text_score = 0.0;

  bool operator==(const Detection&) const = default;
};

/// Source of raw (unthresholded) detections for an image and a query string.
class DetectionService {
 public:
  virtual ~DetectionService() = default;
  virtual std::vector<RawDetection> query(const InputSample& image, const std::string& query,
                                          const DetectorConfig& cfg) = 0;
};

/// Recorded service output keyed by "imageid|query|mode", falling back to "imageid|query".
class FixtureDetectionService : public DetectionService {
 public:
  explicit FixtureDetectionService(std::map<std::string, std::vector<RawDetection>> table)
      : table_(std::move(table)) {}
  static FixtureDetectionService load(const std::filesystem::path& path);

  std::vector<RawDetection> query(const InputSample& image, const std::string& query,
                                  const DetectorConfig& cfg) override;

 private:
  std::map<std::string, std::vector<RawDetection>> table_;
};

/// POST {image: base64 PNG, query, box_threshold, text_threshold} ->
///      {detections: [{cx, cy, w, h, box_score, text_score, phrase}]}
class HttpDetectionService : public DetectionService {
 public:
  /// `endpoint` is used when the config passed to query() has none.
  explicit HttpDetectionService(double timeout_seconds = 60.0, std::string endpoint = {})
      : timeout_(timeout_seconds), endpoint_(std::move(endpoint)) {}
  std::vector<RawDetection> query(const InputSample& image, const std::string& query,
                                  const DetectorConfig& cfg) override;

 private:
  double timeout_;
  std::string endpoint_;
};

std::vector<RawDetection> raw_detections_from_json(const std::string& body);

/// Objects joined the way the detector expects them: "beak . tail".
std::string detection_query(const std::vector<std::string>& objects);

/// Smallest inclusive-exclusive pixel box enclosing a normalized center box,
/// clipped to the image.
PixelBox to_pixel_box(const RawDetection& d, std::size_t width, std::size_t height);

/// Keeps detections meeting both thresholds and converts them to pixel boxes.
std::vector<Detection> threshold_detections(const std::vector<RawDetection>& raw, const DetectorConfig& cfg,
                                            std::size_t width, std::size_t height);

/// Queries the service and thresholds. Throws NoDetections when nothing survives.
std::vector<Detection> detect(const InputSample& x, const std::vector<std::string>& objects,
                              const DetectorConfig& cfg, DetectionService& service);

/// Drops equal duplicates (keeping the highest box_score), then every box that
/// strictly contains another. The survivors are the innermost boxes, in input order.
std::vector<Detection> prune_containing(const std::vector<Detection>& dets);

/// detect -> prune (loose mode only) -> regions labelled with the phrase.
Grounding ground_image(const SemanticSpec& spec, const InputSample& x, const DetectorConfig& cfg,
                       DetectionService& service);

double iou(const PixelBox& a, const PixelBox& b);

/// Recorded sound-event intervals keyed by "sampleid|query".
class AudioIntervalFixture {
 public:
  explicit AudioIntervalFixture(std::map<std::string, std::vector<Region>> table) : table_(std::move(table)) {}
  static AudioIntervalFixture load(const std::filesystem::path& path);

  /// Throws NoDetections on a miss or an empty entry.
  Grounding ground(const SemanticSpec& spec, const InputSample& x) const;

 private:
  std::map<std::string, std::vector<Region>> table_;
};

}  // namespace semground
