#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semground/types.hpp"

namespace semground {

enum class ParserBackend { Rules, Llm };
enum class ParserMode { Detailed, Minimal };
/// System prompt family; it also fixes the domain of the parsed action.
enum class PromptTemplate { Visual, Tabular, Audio };

std::string_view to_string(ParserBackend b);
std::string_view to_string(ParserMode m);
std::string_view to_string(PromptTemplate t);
ParserBackend parser_backend_from_string(std::string_view s);
ParserMode parser_mode_from_string(std::string_view s);
PromptTemplate prompt_template_from_string(std::string_view s);
Domain domain_of(PromptTemplate t);
PromptTemplate prompt_template_for(Domain d);

/// Free-text names for a tabular attribute, used by the rule backend.
struct AttributeVocabulary {
  std::string name;
  std::vector<std::string> aliases;
};

struct ParserConfig {
  ParserBackend backend = ParserBackend::Rules;
  ParserMode mode = ParserMode::Detailed;
  PromptTemplate prompt_template = PromptTemplate::Visual;
  std::string llm_endpoint;
  std::string llm_model;
  std::string llm_api_key_env;
  double timeout = 60.0;  // seconds
  std::vector<AttributeVocabulary> attributes;
};

struct ParseResult {
  SemanticSpec spec;
  std::string raw_response;
  double latency = 0.0;  // seconds
};

/// Action trigger lexicon. File format, one rule per line:
///   <action> TAB <comma-separated trigger phrases>
/// A trigger may contain "..." to allow a gap ("brightness ... increased").
/// Blank lines and lines starting with '#' are ignored.
class Lexicon {
 public:
  struct Trigger {
    Operation action;
    std::string text;
    std::vector<std::vector<std::string>> fragments;
  };

  static Lexicon from_text(std::string_view text);
  static Lexicon load(const std::filesystem::path& path);

  const std::vector<Trigger>& triggers() const noexcept { return triggers_; }

 private:
  std::vector<Trigger> triggers_;
};

/// Deterministic rule-based parser for the supported prompt family.
/// Throws NoActionFound, ConflictingActions or NoObjectFound.
ParseResult parse_rules(std::string_view property_text, const ParserConfig& config, const Lexicon& lexicon);

/// Relational bounds such as "younger than 50", "at least 3" or "between 2 and 5".
std::optional<RawBound> extract_raw_bound(std::string_view property_text);

/// Reduces a noun phrase to its head noun: "purple thorn in the bottom" -> "thorn".
std::string head_noun(std::string_view phrase);

// ---- chat-model backend ----

/// System prompt for a template/mode pair.
std::string system_prompt(PromptTemplate t, ParserMode mode);

/// Anything that turns (system prompt, user prompt) into raw response text.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const std::string& system, const std::string& user) = 0;
};

/// Replays recorded responses keyed by the SHA-256 hex of the exact user prompt.
class FixtureTransport : public ChatTransport {
 public:
  explicit FixtureTransport(std::map<std::string, std::string> table) : table_(std::move(table)) {}
  std::string complete(const std::string& system, const std::string& user) override;
  const std::map<std::string, std::string>& table() const noexcept { return table_; }

 private:
  std::map<std::string, std::string> table_;
};

/// Loads a {sha256: response_text} fixture file.
FixtureTransport llm_fixture_load(const std::filesystem::path& path);

/// OpenAI-compatible chat completions over HTTP(S), temperature pinned to 0.
class HttpChatTransport : public ChatTransport {
 public:
  explicit HttpChatTransport(ParserConfig config);
  std::string complete(const std::string& system, const std::string& user) override;

 private:
  ParserConfig config_;
};

/// Removes a surrounding ``` / ```json fence if present.
std::string strip_code_fences(std::string_view text);

/// Turns response text into a SemanticSpec for the given template.
/// Throws MalformedResponse or UnsupportedAction.
SemanticSpec interpret_llm_response(std::string_view response, PromptTemplate t);

ParseResult parse_llm(std::string_view property_text, const ParserConfig& config, ChatTransport& transport);

/// Dispatches on config.backend. `transport` is required for the llm backend.
ParseResult parse(std::string_view property_text, const ParserConfig& config, const Lexicon& lexicon,
                  ChatTransport* transport);

}  // namespace semground
