#include <algorithm>
#include <chrono>
#include <cstdlib>

#include <httplib.h>

#include "semground/error.hpp"
#include "semground/json_io.hpp"
#include "semground/parser.hpp"
#include "semground/text.hpp"

namespace semground {

namespace {

constexpr std::string_view kVisualPromptHead = R"(# Role
You are a specialist in Visual Grounding. Your task is to extract the specific objects mentioned in a formal verification query that need to be localized in an image,and to identify which image transformation is being requested in each query.

# TASK
1. Analyze the user's natural language verification property.
2. Identify the objects that must be removed, changed, or checked (the "disturbing" objects).
3. Identify the action.
4. Pack the results into a JSON object with two fields: "object" and "action".

# SUPPORTED ACTIONS
You must categorize the request into exactly one of these supported operations:
- remove
- add_noise
- increase_brightness
- decrease_brightness
- increase_contrast
- decrease_contrast
- rotate
- scale_up
- scale_down

# RULES
)";

constexpr std::string_view kVisualPromptTail = R"(
- If there are multiple distinct types of objects, separate them with a dot (e.g., "cat . dog").
- Do NOT include any introductory text, reasoning, or punctuation like periods at the end.
- Your output must be ONLY the result JSON.
- Produce JSON with the format
```json
{
  "object": <object>,
  "action": <action>
}
```

# EXAMPLES
User: "Check that the classification of the pedestrian is correct even if the cars are not clear."
Response:
{
  "object": "cars",
  "action": "add_noise"
}

User: "check that the bird is classified correctly if both the beak and the tail are missing."
Response:
{
  "object": "beak . tail",
  "action": "remove"
}

User: "is it possible that the car is misclassified when the brightness of its front wheels is increased?"
Response:
{
  "object": )";

constexpr std::string_view kVisualPromptEnd = R"(,
  "action": "increase_brightness"
}
)";

constexpr std::string_view kTabularPrompt = R"(# Role
You are a specialist in Tabular Data Grounding. Your task is to extract the specific attributes mentioned in a user query and identify the variable and action required for formal verification of his query.

# TASK
1. Analyze the user's natural language verification property.
2. Identify the attribute that must be modified.
3. Identify the action.
4. Pack the results into a JSON object with two fields: "attribute" and "action".

# Attributes
Attribute2 - Duration (months)
Attribute5 - Credit amount
Attribute8 - Installment rate as a percentage of disposable income
Attribute11 - Present residence since
Attribute13 - Age (years)
Attribute16 - Number of existing credits at this bank
Attribute18 - Number of people liable to provide maintenance for

# SUPPORTED ACTIONS
You must categorize the request into exactly one of these supported operations:
- increase
- decrease
- change

# RULES
- Your output must be ONLY the result JSON.
- Produce JSON with the format
```json
{
  "attribute": <attribute>,
  "action": <action>
}
```

# EXAMPLES
User: "Could I get the loan if I had fewer dependents?"
Output:
```json
{
  "attribute": "Attribute18",
  "action": "decrease"
}
```
)";

constexpr std::string_view kAudioPromptHead = R"(# Role
You are a specialist in Audio Grounding. Your task is to extract the specific sound events mentioned in a formal verification query that need to be localized in an audio recording, and to identify which audio transformation is being requested in each query.

# TASK
1. Analyze the user's natural language verification property.
2. Identify the sound events that must be changed (the "disturbing" events).
3. Identify the action.
4. Pack the results into a JSON object with two fields: "object" and "action".

# SUPPORTED ACTIONS
You must categorize the request into exactly one of these supported operations:
- amplify

# RULES
)";

constexpr std::string_view kAudioPromptTail = R"(
- If there are multiple distinct types of events, separate them with a dot (e.g., "siren . dog barking").
- Do NOT include any introductory text, reasoning, or punctuation like periods at the end.
- Your output must be ONLY the result JSON.
- Produce JSON with the format
```json
{
  "object": <object>,
  "action": <action>
}
```

# EXAMPLES
User: "The emergency siren is detected even if drilling noise is louder."
Response:
{
  "object": )";

constexpr std::string_view kAudioPromptEnd = R"(,
  "action": "amplify"
}
)";

std::string rules_line(ParserMode mode) {
  return mode == ParserMode::Detailed ? R"(- Use only noun phrases (e.g., "all cars", "the left cat").)"
                                      : R"(- Use only object names (e.g., "car", "cat").)";
}

std::vector<std::string> split_objects(const json& value) {
  std::vector<std::string> parts;
  if (value.is_string()) {
    for (auto& p : text::split(value.get<std::string>(), " . ")) {
      auto t = text::trim(p);
      while (!t.empty() && t.back() == '.') t = text::trim(t.substr(0, t.size() - 1));
      if (!t.empty()) parts.push_back(std::move(t));
    }
  } else if (value.is_array()) {
    for (const auto& v : value) {
      if (!v.is_string()) throw Error(ErrorCode::MalformedResponse, "object list holds a non-string");
      auto t = text::trim(v.get<std::string>());
      if (!t.empty()) parts.push_back(std::move(t));
    }
  } else {
    throw Error(ErrorCode::MalformedResponse, "object field is neither a string nor a list");
  }
  return parts;
}

}  // namespace

std::string system_prompt(PromptTemplate t, ParserMode mode) {
  const bool detailed = mode == ParserMode::Detailed;
  switch (t) {
    case PromptTemplate::Visual:
      return std::string(kVisualPromptHead) + rules_line(mode) + std::string(kVisualPromptTail) +
             (detailed ? "\"front wheels\"" : "\"wheels\"") + std::string(kVisualPromptEnd);
    case PromptTemplate::Tabular:
      return std::string(kTabularPrompt);
    case PromptTemplate::Audio:
      return std::string(kAudioPromptHead) + rules_line(mode) + std::string(kAudioPromptTail) +
             (detailed ? "\"drilling noise\"" : "\"noise\"") + std::string(kAudioPromptEnd);
  }
  return {};
}

std::string strip_code_fences(std::string_view text) {
  auto body = text::trim(text);
  const auto open = body.find("```");
  if (open == std::string::npos) return body;
  auto line_end = body.find('\n', open);
  if (line_end == std::string::npos) return body;
  const auto close = body.find("```", line_end);
  return text::trim(body.substr(line_end + 1, close == std::string::npos ? std::string::npos : close - line_end - 1));
}

SemanticSpec interpret_llm_response(std::string_view response, PromptTemplate t) {
  const auto body = strip_code_fences(response);
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::MalformedResponse, "response is not a JSON object");
  const char* object_key = t == PromptTemplate::Tabular ? "attribute" : "object";
  if (!j.contains(object_key)) {
    throw Error(ErrorCode::MalformedResponse, std::string("response lacks \"") + object_key + "\"");
  }
  if (!j.contains("action") || !j["action"].is_string()) {
    throw Error(ErrorCode::MalformedResponse, "response lacks a string \"action\"");
  }
  const auto action_name = text::to_lower(text::trim(j["action"].get<std::string>()));
  const auto op = try_operation_from_string(action_name);
  const Domain domain = domain_of(t);
  if (!op || domain_of(*op) != domain) {
    throw Error(ErrorCode::UnsupportedAction,
                "'" + action_name + "' is not in the " + std::string(to_string(t)) + " action list");
  }
  SemanticSpec spec;
  spec.objects = split_objects(j[object_key]);
  if (spec.objects.empty()) throw Error(ErrorCode::MalformedResponse, "response has no objects");
  spec.operation = *op;
  spec.domain_hint = domain;
  validate(spec);
  return spec;
}

std::string FixtureTransport::complete(const std::string&, const std::string& user) {
  const auto key = text::sha256_hex(user);
  const auto it = table_.find(key);
  if (it == table_.end()) throw Error(ErrorCode::FixtureMiss, "no recorded response for prompt " + key);
  return it->second;
}

FixtureTransport llm_fixture_load(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  if (!j.is_object()) throw Error(ErrorCode::MalformedFile, path.string() + ": expected a JSON object");
  std::map<std::string, std::string> table;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) throw Error(ErrorCode::MalformedFile, path.string() + ": response for " + key + " is not text");
    table.emplace(key, value.get<std::string>());
  }
  return FixtureTransport(std::move(table));
}

HttpChatTransport::HttpChatTransport(ParserConfig config) : config_(std::move(config)) {
  if (config_.llm_endpoint.empty()) throw Error(ErrorCode::InvalidArgument, "llm endpoint not configured");
}

std::string HttpChatTransport::complete(const std::string& system, const std::string& user) {
  // endpoint: scheme://host[:port]/path
  const auto& url = config_.llm_endpoint;
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  const auto secs = static_cast<time_t>(config_.timeout);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);

  httplib::Headers headers;
  if (!config_.llm_api_key_env.empty()) {
    if (const char* key = std::getenv(config_.llm_api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const json body{{"model", config_.llm_model},
                  {"temperature", 0},
                  {"messages", json::array({{{"role", "system"}, {"content", system}},
                                            {{"role", "user"}, {"content", user}}})}};
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::TransportError, "request to " + origin + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::TransportError, "endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto j = json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("unexpected chat response envelope: ") + e.what());
  }
}

ParseResult parse_llm(std::string_view property_text, const ParserConfig& config, ChatTransport& transport) {
  if (text::trim(property_text).empty()) throw Error(ErrorCode::InvalidArgument, "empty property text");
  const auto system = system_prompt(config.prompt_template, config.mode);
  const std::string user(property_text);
  const auto t0 = std::chrono::steady_clock::now();
  auto raw = transport.complete(system, user);
  const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto spec = interpret_llm_response(raw, config.prompt_template);
  if (spec.domain_hint == Domain::Tabular) spec.bound = extract_raw_bound(property_text);
  return ParseResult{std::move(spec), std::move(raw), latency};
}

}  // namespace semground
