#include <doctest.h>

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "semground/error.hpp"
#include "semground/eval.hpp"
#include "semground/parser.hpp"
#include "semground/tabular.hpp"
#include "semground/text.hpp"
#include "support/oracles.hpp"

using namespace semground;

namespace {

const Lexicon& lexicon() {
  static const Lexicon lex = Lexicon::load(oracle::data("lexicon.tsv"));
  return lex;
}

ParserConfig config(PromptTemplate t, ParserMode m = ParserMode::Detailed) {
  ParserConfig c;
  c.prompt_template = t;
  c.mode = m;
  if (t == PromptTemplate::Tabular) {
    const auto schema = load_schema(oracle::data("statlog_schema.json"));
    for (const auto& a : schema.attributes()) c.attributes.push_back({a.name, a.aliases});
  }
  return c;
}

ErrorCode rule_error(const std::string& prompt, PromptTemplate t) {
  try {
    parse_rules(prompt, config(t), lexicon());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return ErrorCode::InvalidArgument;
}

/// Local stand-in for a chat-completions endpoint.
struct ChatServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::string last_body;
  std::string last_auth;
  int status = 200;
  std::string reply;

  ChatServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      res.status = status;
      res.set_content(reply, "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~ChatServer() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"; }
};

std::string envelope(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

}  // namespace

TEST_CASE("rule backend reproduces the reference prompts") {
  auto r = parse_rules("Check that the classification of the pedestrian is correct even if the cars are not clear.",
                       config(PromptTemplate::Visual), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"cars"});
  CHECK(r.spec.operation == Operation::AddNoise);
  CHECK(r.spec.domain_hint == Domain::Image);

  r = parse_rules("check that the bird is classified correctly if both the beak and the tail are missing.",
                  config(PromptTemplate::Visual), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"beak", "tail"});
  CHECK(r.spec.operation == Operation::Remove);

  const std::string wheels =
      "is it possible that the car is misclassified when the brightness of its front wheels is increased?";
  r = parse_rules(wheels, config(PromptTemplate::Visual, ParserMode::Detailed), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"front wheels"});
  CHECK(r.spec.operation == Operation::IncreaseBrightness);
  r = parse_rules(wheels, config(PromptTemplate::Visual, ParserMode::Minimal), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"wheels"});

  r = parse_rules("Could I get the loan if I had fewer dependents?", config(PromptTemplate::Tabular), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"Attribute18"});
  CHECK(r.spec.operation == Operation::Decrease);
  CHECK(r.spec.domain_hint == Domain::Tabular);
  CHECK_FALSE(r.spec.bound.has_value());
}

TEST_CASE("rule backend on the other sample prompts") {
  auto r = parse_rules("The credit decision should not change for applicants younger than 50.",
                       config(PromptTemplate::Tabular), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"Attribute13"});
  CHECK(r.spec.operation == Operation::Change);
  REQUIRE(r.spec.bound.has_value());
  CHECK_FALSE(r.spec.bound->lower.has_value());
  CHECK(r.spec.bound->upper == 50.0);

  r = parse_rules("The bird is classified correctly even if its beak is occluded.", config(PromptTemplate::Visual),
                  lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"beak"});
  CHECK(r.spec.operation == Operation::Remove);

  r = parse_rules("Can the prediction change if all the purple thorns in the image are partially occluded?",
                  config(PromptTemplate::Visual), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"purple thorns"});

  r = parse_rules("Can the prediction change if the purple thorn in the bottom is noisier?",
                  config(PromptTemplate::Visual, ParserMode::Minimal), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"thorn"});
  CHECK(r.spec.operation == Operation::AddNoise);

  r = parse_rules("Can the prediction change if both beak and legs are missing?", config(PromptTemplate::Visual),
                  lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"beak", "legs"});

  r = parse_rules("The emergency siren is detected even if drilling noise is louder.", config(PromptTemplate::Audio),
                  lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"drilling noise"});
  CHECK(r.spec.operation == Operation::Amplify);
  CHECK(r.spec.domain_hint == Domain::Audio);
}

TEST_CASE("rule backend matches the labels wherever the fixture expects it to") {
  const auto items = load_parse_fixtures(oracle::data("fixtures/parse_eval.json"));
  REQUIRE(items.size() == 20);
  for (auto mode : {ParserMode::Detailed, ParserMode::Minimal}) {
    for (const auto& item : items) {
      CAPTURE(item.prompt);
      CAPTURE(to_string(mode));
      // three prompts are known misses of the rule backend
      if (item.prompt.find("loan duration") != std::string::npos) continue;
      if (mode == ParserMode::Detailed && (item.prompt.find("stop sign") != std::string::npos ||
                                           item.prompt.find("fence behind") != std::string::npos))
        continue;
      const auto r = parse_rules(item.prompt, config(item.prompt_template, mode), lexicon());
      CHECK(r.spec.objects == item.expected_objects(mode));
      CHECK(r.spec.operation == item.expected_action);
    }
  }
}

TEST_CASE("rule backend known misses") {
  auto r = parse_rules("Does the classifier still see a stop sign when the sign is scaled down?",
                       config(PromptTemplate::Visual), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"sign"});
  r = parse_rules("The horse should be classified correctly even if the fence behind it is blurry.",
                  config(PromptTemplate::Visual), lexicon());
  CHECK(r.spec.objects == std::vector<std::string>{"fence behind"});
  CHECK(rule_error("Would the outcome differ if the loan duration were longer?", PromptTemplate::Tabular) ==
        ErrorCode::ConflictingActions);
}

TEST_CASE("rule backend errors") {
  CHECK(rule_error("The bird is classified correctly.", PromptTemplate::Visual) == ErrorCode::NoActionFound);
  CHECK(rule_error("The bird is classified correctly if its beak is missing and the wings are brighter.",
                   PromptTemplate::Visual) == ErrorCode::ConflictingActions);
  CHECK(rule_error("Is it still fine if it is missing?", PromptTemplate::Visual) == ErrorCode::NoObjectFound);
  CHECK(rule_error("Could I get the loan if I had fewer pets?", PromptTemplate::Tabular) == ErrorCode::NoObjectFound);
  CHECK(rule_error("   ", PromptTemplate::Visual) == ErrorCode::InvalidArgument);
}

TEST_CASE("triggers only fire inside their template's domain") {
  // "louder" is an audio trigger and must not be picked up by the visual template
  CHECK(rule_error("The bird is classified correctly if the song is louder.", PromptTemplate::Visual) ==
        ErrorCode::NoActionFound);
}

TEST_CASE("relational bounds") {
  auto b = extract_raw_bound("applicants younger than 50");
  REQUIRE(b);
  CHECK(b->upper == 50.0);
  CHECK_FALSE(b->lower);
  b = extract_raw_bound("applicants older than 30");
  REQUIRE(b);
  CHECK(b->lower == 30.0);
  b = extract_raw_bound("no younger than 25");
  REQUIRE(b);
  CHECK(b->lower == 25.0);
  b = extract_raw_bound("between 60 and 24 months");
  REQUIRE(b);
  CHECK(b->lower == 24.0);
  CHECK(b->upper == 60.0);
  b = extract_raw_bound("at most 3 credits");
  REQUIRE(b);
  CHECK(b->upper == 3.0);
  b = extract_raw_bound("at least 2.5");
  REQUIRE(b);
  CHECK(b->lower == 2.5);
  CHECK_FALSE(extract_raw_bound("fewer dependents"));
}

TEST_CASE("head noun") {
  CHECK(head_noun("purple thorn in the bottom") == "thorn");
  CHECK(head_noun("front wheels") == "wheels");
  CHECK(head_noun("beak") == "beak");
  CHECK(head_noun("fence behind it") == "fence");
}

TEST_CASE("lexicon file format") {
  const auto lex = Lexicon::from_text("# comment\n\nremove\tmissing, brightness ... gone\n");
  REQUIRE(lex.triggers().size() == 2);
  CHECK(lex.triggers()[1].fragments.size() == 2);
  CHECK_THROWS_AS(Lexicon::from_text("remove missing"), Error);
  CHECK_THROWS_AS(Lexicon::from_text("teleport\tbeamed"), Error);
}

TEST_CASE("code fences are stripped without changing the content") {
  const std::string body = "{\"object\": \"cars\", \"action\": \"add_noise\"}";
  CHECK(strip_code_fences("```json\n" + body + "\n```") == body);
  CHECK(strip_code_fences("```\n" + body + "\n```") == body);
  CHECK(strip_code_fences(body) == body);
  CHECK(interpret_llm_response("```json\n" + body + "\n```", PromptTemplate::Visual) ==
        interpret_llm_response(body, PromptTemplate::Visual));
}

TEST_CASE("llm responses are interpreted per template") {
  auto s = interpret_llm_response(R"({"object": "beak . tail", "action": "remove"})", PromptTemplate::Visual);
  CHECK(s.objects == std::vector<std::string>{"beak", "tail"});
  s = interpret_llm_response(R"({"attribute": "Attribute18", "action": "decrease"})", PromptTemplate::Tabular);
  CHECK(s.objects == std::vector<std::string>{"Attribute18"});
  CHECK(s.domain_hint == Domain::Tabular);

  auto code = [](const std::string& text, PromptTemplate t) {
    try {
      interpret_llm_response(text, t);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code("not json at all", PromptTemplate::Visual) == ErrorCode::MalformedResponse);
  CHECK(code(R"({"action": "remove"})", PromptTemplate::Visual) == ErrorCode::MalformedResponse);
  CHECK(code(R"({"object": "beak", "action": "teleport"})", PromptTemplate::Visual) == ErrorCode::UnsupportedAction);
  CHECK(code(R"({"object": "beak", "action": "decrease"})", PromptTemplate::Visual) == ErrorCode::UnsupportedAction);
  CHECK(code(R"({"object": "", "action": "remove"})", PromptTemplate::Visual) == ErrorCode::MalformedResponse);
}

TEST_CASE("system prompts follow the template and mode") {
  const auto detailed = system_prompt(PromptTemplate::Visual, ParserMode::Detailed);
  const auto minimal = system_prompt(PromptTemplate::Visual, ParserMode::Minimal);
  CHECK(detailed != minimal);
  CHECK(detailed.find("add_noise") != std::string::npos);
  const auto tab = system_prompt(PromptTemplate::Tabular, ParserMode::Detailed);
  CHECK(tab.find("Attribute13 - Age (years)") != std::string::npos);
  CHECK(tab.find("\"attribute\"") != std::string::npos);
}

TEST_CASE("fixture replay is keyed by the prompt hash") {
  const std::string prompt = "Could I get the loan if I had fewer dependents?";
  FixtureTransport t({{text::sha256_hex(prompt), R"({"attribute": "Attribute18", "action": "decrease"})"}});
  const auto a = parse_llm(prompt, config(PromptTemplate::Tabular), t);
  const auto b = parse_llm(prompt, config(PromptTemplate::Tabular), t);
  CHECK(a.spec == b.spec);
  CHECK(a.raw_response == b.raw_response);
  CHECK(a.spec.objects == std::vector<std::string>{"Attribute18"});
  try {
    parse_llm("something else entirely", config(PromptTemplate::Tabular), t);
    FAIL("expected FixtureMiss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FixtureMiss);
  }
}

TEST_CASE("sha256 of known strings") {
  CHECK(text::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(text::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("chat transport speaks the chat-completions wire format") {
  ChatServer server;
  server.reply = envelope("```json\n{\"object\": \"cars\", \"action\": \"add_noise\"}\n```");
  ::setenv("SEMGROUND_TEST_KEY", "sk-test", 1);
  auto cfg = config(PromptTemplate::Visual, ParserMode::Minimal);
  cfg.backend = ParserBackend::Llm;
  cfg.llm_endpoint = server.url();
  cfg.llm_model = "test-model";
  cfg.llm_api_key_env = "SEMGROUND_TEST_KEY";
  cfg.timeout = 5;
  HttpChatTransport transport(cfg);
  const std::string prompt = "Check that the classification of the pedestrian is correct even if the cars are not clear.";
  const auto r = parse(prompt, cfg, lexicon(), &transport);
  CHECK(r.spec.objects == std::vector<std::string>{"cars"});
  CHECK(r.spec.operation == Operation::AddNoise);
  CHECK(r.latency >= 0.0);

  const auto sent = nlohmann::json::parse(server.last_body);
  CHECK(sent["model"] == "test-model");
  CHECK(sent["temperature"] == 0);
  REQUIRE(sent["messages"].size() == 2);
  CHECK(sent["messages"][0]["role"] == "system");
  CHECK(sent["messages"][0]["content"] == system_prompt(PromptTemplate::Visual, ParserMode::Minimal));
  CHECK(sent["messages"][1]["role"] == "user");
  CHECK(sent["messages"][1]["content"] == prompt);
  CHECK(server.last_auth == "Bearer sk-test");

  server.status = 500;
  try {
    transport.complete("s", "u");
    FAIL("expected TransportError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TransportError);
  }
  server.status = 200;
  server.reply = R"({"unexpected": true})";
  try {
    transport.complete("s", "u");
    FAIL("expected MalformedResponse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedResponse);
  }
}

TEST_CASE("unreachable chat endpoint is a transport error") {
  auto cfg = config(PromptTemplate::Visual);
  cfg.llm_endpoint = "http://127.0.0.1:1/v1/chat/completions";
  cfg.timeout = 2;
  HttpChatTransport transport(cfg);
  try {
    transport.complete("s", "u");
    FAIL("expected TransportError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TransportError);
  }
}
