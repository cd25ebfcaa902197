#include "semground/backends.hpp"

#include <cstdlib>

namespace semground {

#ifndef SEMGROUND_DATA_DIR
#define SEMGROUND_DATA_DIR "data"
#endif

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("SEMGROUND_DATA"); env && *env) return env;
  return SEMGROUND_DATA_DIR;
}

BackendSettings default_backend_settings() {
  const auto dir = default_data_dir();
  BackendSettings s;
  s.lexicon = dir / "lexicon.tsv";
  s.schema = dir / "statlog_schema.json";
  return s;
}

Backends::Backends(const BackendSettings& settings, const PipelineOptions& opts) {
  if (opts.parser.backend == ParserBackend::Rules) lexicon_ = Lexicon::load(settings.lexicon);
  if (opts.domain == Domain::Tabular) schema_ = load_schema(settings.schema);

  if (opts.parser.backend == ParserBackend::Llm) {
    if (settings.fixtures_dir) {
      const auto file = *settings.fixtures_dir / ("llm_" + std::string(to_string(opts.parser.mode)) + ".json");
      chat_ = std::make_unique<FixtureTransport>(llm_fixture_load(file));
    } else {
      chat_ = std::make_unique<HttpChatTransport>(opts.parser);
    }
  }

  if (opts.domain == Domain::Image) {
    if (settings.fixtures_dir) {
      detector_ = std::make_unique<FixtureDetectionService>(
          FixtureDetectionService::load(*settings.fixtures_dir / "detections.json"));
    } else {
      detector_ = std::make_unique<HttpDetectionService>(settings.detector_timeout, opts.detector.endpoint);
    }
  }

  if (opts.domain == Domain::Audio && settings.fixtures_dir) {
    audio_ = AudioIntervalFixture::load(*settings.fixtures_dir / "audio_intervals.json");
  }
}

PipelineResources Backends::resources() const {
  PipelineResources r;
  r.lexicon = lexicon_ ? &*lexicon_ : nullptr;
  r.chat = chat_.get();
  r.detector = detector_.get();
  r.schema = schema();
  r.audio = audio_ ? &*audio_ : nullptr;
  return r;
}

}  // namespace semground
