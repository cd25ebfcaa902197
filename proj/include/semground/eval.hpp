#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semground/detection.hpp"
#include "semground/json_io.hpp"
#include "semground/parser.hpp"

namespace semground {

struct ParseFixtureItem {
  std::string prompt;
  PromptTemplate prompt_template = PromptTemplate::Visual;
  Operation expected_action = Operation::Remove;
  std::vector<std::string> expected_detailed;
  std::vector<std::string> expected_minimal;

  const std::vector<std::string>& expected_objects(ParserMode m) const {
    return m == ParserMode::Minimal ? expected_minimal : expected_detailed;
  }
};

/// File: {"items": [{prompt, template, expected_action, expected_objects}]}
/// or a bare list. expected_objects is a list (both modes) or {detailed, minimal}.
std::vector<ParseFixtureItem> parse_fixtures_from_json(const json& j);
std::vector<ParseFixtureItem> load_parse_fixtures(const std::filesystem::path& path);

struct ParseRow {
  std::string prompt;
  bool object_ok = false;
  bool action_ok = false;
  double latency = 0.0;
  std::optional<SemanticSpec> got;
  std::string error;
};

struct ParseMetrics {
  std::string label;
  std::size_t total = 0;
  std::size_t object_correct = 0;
  std::size_t action_correct = 0;
  double latency_mean = 0.0;
  double latency_std = 0.0;  // n-1 denominator, 0 for a single item
  std::vector<ParseRow> rows;

  double object_accuracy() const { return static_cast<double>(object_correct) / static_cast<double>(total); }
  double action_accuracy() const { return static_cast<double>(action_correct) / static_cast<double>(total); }
};

/// Case-insensitive, whitespace-trimmed set equality.
bool same_object_set(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Mean and sample standard deviation.
std::pair<double, double> mean_and_sample_std(const std::vector<double>& xs);

/// Runs the parser over every item. Each item's template overrides
/// config.prompt_template; a parse error scores zero on both columns.
ParseMetrics eval_parse(const std::vector<ParseFixtureItem>& items, const ParserConfig& config,
                        const Lexicon& lexicon, ChatTransport* transport);

std::string format_parse_table(const std::vector<ParseMetrics>& runs);
json to_json(const ParseMetrics& m);

struct LabeledBox {
  std::string label;
  PixelBox box;
};

struct DetectFixtureItem {
  std::string image_id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::string> objects_detailed;
  std::vector<std::string> objects_minimal;
  std::vector<LabeledBox> labeled_boxes;
};

/// File: {"items": [{image_id, width, height, objects: {detailed, minimal},
/// labeled_boxes: [{label, box: [x1, y1, x2, y2]}]}]} or a bare list.
std::vector<DetectFixtureItem> detect_fixtures_from_json(const json& j);
std::vector<DetectFixtureItem> load_detect_fixtures(const std::filesystem::path& path);

struct DetectConfigRow {
  ParserMode mode = ParserMode::Detailed;
  Tightness tightness = Tightness::Tight;
  std::size_t successes = 0;
};

struct DetectMetrics {
  std::size_t total = 0;
  double iou_threshold = 0.5;
  std::vector<DetectConfigRow> configs;  // detailed/tight, detailed/loose, minimal/tight, minimal/loose
  std::size_t any_successes = 0;
  /// per item, per config (same order as configs)
  std::vector<std::vector<bool>> outcomes;

  double accuracy(std::size_t successes) const {
    return static_cast<double>(successes) / static_cast<double>(total);
  }
};

/// True when every labeled box is matched by some region with IoU >= threshold.
bool localized(const Grounding& g, const std::vector<LabeledBox>& labeled, double iou_threshold);

DetectMetrics eval_detect(const std::vector<DetectFixtureItem>& items, DetectionService& service,
                          double iou_threshold = 0.5);

std::string format_detect_table(const DetectMetrics& m);
json to_json(const DetectMetrics& m);

}  // namespace semground
