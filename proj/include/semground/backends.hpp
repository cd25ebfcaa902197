#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "semground/pipeline.hpp"

namespace semground {

/// Where the stages get their models from. With `fixtures_dir` set, the chat
/// model and detector are replayed from recorded files:
///   llm_<mode>.json          sha256(user prompt) -> response text
///   detections.json          "id|query[|tightness]" -> detections
///   audio_intervals.json     "id|query" -> intervals
/// Otherwise the HTTP endpoints are used.
struct BackendSettings {
  std::filesystem::path lexicon;
  std::filesystem::path schema;
  std::optional<std::filesystem::path> fixtures_dir;
  double detector_timeout = 60.0;
};

/// Owns the backends and hands out a PipelineResources view. Only the pieces
/// the domain and parser need are opened.
class Backends {
 public:
  Backends(const BackendSettings& settings, const PipelineOptions& opts);

  PipelineResources resources() const;
  const DatasetSchema* schema() const { return schema_ ? &*schema_ : nullptr; }

 private:
  std::optional<Lexicon> lexicon_;
  std::unique_ptr<ChatTransport> chat_;
  std::unique_ptr<DetectionService> detector_;
  std::optional<DatasetSchema> schema_;
  std::optional<AudioIntervalFixture> audio_;
};

/// The data directory baked in at build time (lexicon, schema, fixtures).
std::filesystem::path default_data_dir();

BackendSettings default_backend_settings();

}  // namespace semground
