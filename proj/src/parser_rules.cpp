#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <set>
#include <unordered_set>

#include "semground/error.hpp"
#include "semground/json_io.hpp"
#include "semground/parser.hpp"
#include "semground/text.hpp"

namespace semground {

std::string_view to_string(ParserBackend b) { return b == ParserBackend::Rules ? "rules" : "llm"; }
std::string_view to_string(ParserMode m) { return m == ParserMode::Detailed ? "detailed" : "minimal"; }

std::string_view to_string(PromptTemplate t) {
  switch (t) {
    case PromptTemplate::Visual: return "visual";
    case PromptTemplate::Tabular: return "tabular";
    case PromptTemplate::Audio: return "audio";
  }
  return "?";
}

ParserBackend parser_backend_from_string(std::string_view s) {
  if (s == "rules") return ParserBackend::Rules;
  if (s == "llm") return ParserBackend::Llm;
  throw Error(ErrorCode::InvalidArgument, "unknown parser backend '" + std::string(s) + "'");
}

ParserMode parser_mode_from_string(std::string_view s) {
  if (s == "detailed") return ParserMode::Detailed;
  if (s == "minimal") return ParserMode::Minimal;
  throw Error(ErrorCode::InvalidArgument, "unknown parser mode '" + std::string(s) + "'");
}

PromptTemplate prompt_template_from_string(std::string_view s) {
  if (s == "visual") return PromptTemplate::Visual;
  if (s == "tabular") return PromptTemplate::Tabular;
  if (s == "audio") return PromptTemplate::Audio;
  throw Error(ErrorCode::InvalidArgument, "unknown prompt template '" + std::string(s) + "'");
}

Domain domain_of(PromptTemplate t) {
  switch (t) {
    case PromptTemplate::Visual: return Domain::Image;
    case PromptTemplate::Tabular: return Domain::Tabular;
    case PromptTemplate::Audio: return Domain::Audio;
  }
  return Domain::Image;
}

PromptTemplate prompt_template_for(Domain d) {
  switch (d) {
    case Domain::Image: return PromptTemplate::Visual;
    case Domain::Tabular: return PromptTemplate::Tabular;
    case Domain::Audio: return PromptTemplate::Audio;
  }
  return PromptTemplate::Visual;
}

Lexicon Lexicon::from_text(std::string_view text) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (const auto& raw_line : text::split(text, "\n")) {
    ++line_no;
    const auto line = text::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::MalformedFile, "lexicon line " + std::to_string(line_no) + ": missing tab");
    }
    const auto action_name = text::trim(line.substr(0, tab));
    const auto action = try_operation_from_string(action_name);
    if (!action) {
      throw Error(ErrorCode::MalformedFile,
                  "lexicon line " + std::to_string(line_no) + ": unknown action '" + action_name + "'");
    }
    for (const auto& phrase : text::split(line.substr(tab + 1), ",")) {
      Trigger t{*action, text::trim(phrase), {}};
      if (t.text.empty()) continue;
      for (const auto& frag : text::split(t.text, "...")) {
        auto toks = text::tokenize(frag);
        if (!toks.empty()) t.fragments.push_back(std::move(toks));
      }
      if (!t.fragments.empty()) lex.triggers_.push_back(std::move(t));
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) { return from_text(read_text_file(path)); }

namespace {

const std::unordered_set<std::string> kStopwords{
    "the",    "a",       "an",       "its",      "his",    "her",     "their",    "this",   "that",
    "these",  "those",   "both",     "all",      "each",   "every",   "either",   "neither", "nor",
    "of",     "is",      "are",      "was",      "were",   "be",      "been",     "being",  "gets",
    "get",    "got",     "become",   "becomes",  "became", "made",    "make",     "i",      "we",
    "you",    "he",      "she",      "it",       "they",   "had",     "has",      "have",   "partially",
    "fully",  "completely", "slightly", "somewhat", "heavily", "very",  "entirely", "some",   "any",
    "my",     "our",     "your",     "in",       "on",     "at",      "to",       "by",     "with",
    "from",   "for",     "also",     "still",    "then",   "even",    "only",     "just",   "too",
    "as",     "someone", "somebody", "much",     "would",  "will",    "could",    "should", "can",
    "may",    "might",   "were",     "there",    "if",     "when",    "now"};

const std::unordered_set<std::string> kClauseMarkers{"if", "when", "whenever", "while", "once", "unless"};
const std::unordered_set<std::string> kConjunctions{"and", "or", ",", "&", "plus"};
const std::unordered_set<std::string> kPrepositions{"in",   "on",    "at",    "of",     "near",  "with",
                                                    "under", "above", "below", "behind", "from",  "to",
                                                    "by",   "inside", "around", "beside", "over"};
const std::unordered_set<std::string> kScenes{"image", "picture", "photo", "photograph", "frame",
                                              "scene", "recording", "audio", "clip",    "sound"};

bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

struct BoundScan {
  std::optional<RawBound> bound;
  std::vector<bool> consumed;
};

BoundScan scan_bounds(const std::vector<std::string>& toks) {
  static const std::unordered_set<std::string> upper_cmp{"younger", "less",    "fewer",  "lower",
                                                          "smaller", "shorter", "cheaper"};
  static const std::unordered_set<std::string> lower_cmp{"older", "more", "greater", "higher", "larger", "longer"};
  BoundScan scan;
  scan.consumed.assign(toks.size(), false);
  RawBound b;
  bool any = false;
  auto set_upper = [&](double v) {
    b.upper = b.upper ? std::min(*b.upper, v) : v;
    any = true;
  };
  auto set_lower = [&](double v) {
    b.lower = b.lower ? std::max(*b.lower, v) : v;
    any = true;
  };
  auto consume = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) scan.consumed[k] = true;
  };
  double num = 0.0, num2 = 0.0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    const auto at = [&](std::size_t k) -> const std::string& {
      static const std::string empty;
      return k < toks.size() ? toks[k] : empty;
    };
    if (t == "between" && parse_number(at(i + 1), num) && at(i + 2) == "and" && parse_number(at(i + 3), num2)) {
      set_lower(std::min(num, num2));
      set_upper(std::max(num, num2));
      consume(i, i + 4);
      i += 3;
    } else if ((upper_cmp.count(t) || lower_cmp.count(t)) && at(i + 1) == "than" && parse_number(at(i + 2), num)) {
      bool upper = upper_cmp.count(t) > 0;
      std::size_t from = i;
      if (i > 0 && toks[i - 1] == "no") {
        upper = !upper;
        from = i - 1;
      }
      upper ? set_upper(num) : set_lower(num);
      consume(from, i + 3);
      i += 2;
    } else if ((t == "at" && (at(i + 1) == "most" || at(i + 1) == "least")) && parse_number(at(i + 2), num)) {
      at(i + 1) == "most" ? set_upper(num) : set_lower(num);
      consume(i, i + 3);
      i += 2;
    } else if (t == "up" && at(i + 1) == "to" && parse_number(at(i + 2), num)) {
      set_upper(num);
      consume(i, i + 3);
      i += 2;
    } else if ((t == "under" || t == "below") && parse_number(at(i + 1), num)) {
      set_upper(num);
      consume(i, i + 2);
      i += 1;
    } else if ((t == "over" || t == "above") && parse_number(at(i + 1), num)) {
      set_lower(num);
      consume(i, i + 2);
      i += 1;
    }
  }
  if (any) scan.bound = b;
  return scan;
}

struct TriggerMatch {
  Operation action;
  std::vector<std::size_t> tokens;  // sorted
};

std::optional<std::vector<std::size_t>> match_trigger(const Lexicon::Trigger& trig,
                                                      const std::vector<std::string>& toks,
                                                      const std::vector<bool>& blocked, std::size_t start) {
  std::vector<std::size_t> hit;
  std::size_t pos = start;
  for (std::size_t f = 0; f < trig.fragments.size(); ++f) {
    const auto& frag = trig.fragments[f];
    bool found = false;
    // the first fragment is anchored at `start`; later ones may float forward
    const std::size_t last_start = f == 0 ? start : toks.size();
    for (std::size_t p = pos; p <= last_start && p + frag.size() <= toks.size(); ++p) {
      bool ok = true;
      for (std::size_t k = 0; k < frag.size() && ok; ++k) ok = !blocked[p + k] && toks[p + k] == frag[k];
      if (ok) {
        for (std::size_t k = 0; k < frag.size(); ++k) hit.push_back(p + k);
        pos = p + frag.size();
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return hit;
}

bool strict_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<TriggerMatch> find_actions(const std::vector<std::string>& toks, const std::vector<bool>& blocked,
                                       const Lexicon& lexicon, Domain domain) {
  std::vector<TriggerMatch> matches;
  for (const auto& trig : lexicon.triggers()) {
    if (domain_of(trig.action) != domain) continue;
    for (std::size_t s = 0; s < toks.size(); ++s) {
      if (auto hit = match_trigger(trig, toks, blocked, s)) matches.push_back({trig.action, std::move(*hit)});
    }
  }
  std::vector<TriggerMatch> kept;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < matches.size() && !dominated; ++j) {
      dominated = i != j && strict_subset(matches[i].tokens, matches[j].tokens);
    }
    if (!dominated) kept.push_back(matches[i]);
  }
  return kept;
}

std::vector<std::string> strip_edges(std::vector<std::string> words) {
  while (!words.empty() && kStopwords.count(words.front())) words.erase(words.begin());
  while (!words.empty() && kStopwords.count(words.back())) words.pop_back();
  return words;
}

std::vector<std::string> drop_scene_tail(std::vector<std::string> words) {
  // "... in the image" / "... of this picture"
  if (words.size() >= 2 && kScenes.count(words.back())) {
    std::size_t k = words.size() - 1;
    if (k > 0 && (words[k - 1] == "the" || words[k - 1] == "this" || words[k - 1] == "that")) --k;
    if (k > 0 && kPrepositions.count(words[k - 1])) words.resize(k - 1);
  }
  return words;
}

std::vector<std::string> extract_object_phrases(const std::vector<std::string>& toks,
                                                const std::vector<bool>& removed, std::size_t anchor) {
  std::size_t begin = 0;
  for (std::size_t i = 0; i < anchor; ++i) {
    if (kClauseMarkers.count(toks[i]) && !removed[i]) begin = i + 1;
  }
  std::size_t end = toks.size();
  for (std::size_t i = anchor + 1; i < toks.size(); ++i) {
    if (kClauseMarkers.count(toks[i]) && !removed[i]) {
      end = i;
      break;
    }
  }
  std::vector<std::string> phrases;
  std::vector<std::string> cur;
  auto flush = [&] {
    auto words = strip_edges(drop_scene_tail(strip_edges(cur)));
    if (!words.empty()) {
      auto phrase = text::join(words, " ");
      if (std::find(phrases.begin(), phrases.end(), phrase) == phrases.end()) phrases.push_back(phrase);
    }
    cur.clear();
  };
  for (std::size_t i = begin; i < end; ++i) {
    if (removed[i] || kConjunctions.count(toks[i])) {
      flush();
    } else {
      cur.push_back(toks[i]);
    }
  }
  flush();
  return phrases;
}

std::vector<std::string> find_attributes(std::string_view property_text, const ParserConfig& config) {
  const auto normalized = text::join(text::tokenize(property_text), " ");
  std::vector<std::pair<std::size_t, std::string>> hits;
  for (const auto& attr : config.attributes) {
    std::vector<std::string> terms{text::to_lower(attr.name)};
    for (const auto& a : attr.aliases) terms.push_back(text::join(text::tokenize(a), " "));
    std::size_t best = std::string::npos;
    for (const auto& term : terms) {
      if (term.empty() || !text::contains_phrase(normalized, term)) continue;
      // earliest word-bounded occurrence
      std::size_t pos = 0;
      while ((pos = normalized.find(term, pos)) != std::string::npos) {
        const bool left = pos == 0 || normalized[pos - 1] == ' ';
        const std::size_t e = pos + term.size();
        const bool right = e == normalized.size() || normalized[e] == ' ';
        if (left && right) {
          best = std::min(best, pos);
          break;
        }
        ++pos;
      }
    }
    if (best != std::string::npos) hits.emplace_back(best, attr.name);
  }
  std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> names;
  for (auto& h : hits) names.push_back(std::move(h.second));
  return names;
}

std::string rules_raw_response(const SemanticSpec& spec, PromptTemplate t) {
  json j;
  if (t == PromptTemplate::Tabular) {
    j["attribute"] = text::join(spec.objects, " . ");
  } else {
    j["object"] = text::join(spec.objects, " . ");
  }
  j["action"] = to_string(spec.operation);
  return j.dump(2);
}

}  // namespace

std::optional<RawBound> extract_raw_bound(std::string_view property_text) {
  return scan_bounds(text::tokenize(property_text)).bound;
}

std::string head_noun(std::string_view phrase) {
  auto words = text::tokenize(phrase);
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (kPrepositions.count(words[i])) {
      words.resize(i);
      break;
    }
  }
  words = strip_edges(std::move(words));
  return words.empty() ? text::trim(phrase) : words.back();
}

ParseResult parse_rules(std::string_view property_text, const ParserConfig& config, const Lexicon& lexicon) {
  if (text::trim(property_text).empty()) throw Error(ErrorCode::InvalidArgument, "empty property text");
  const auto toks = text::tokenize(property_text);
  const Domain domain = domain_of(config.prompt_template);

  auto scan = domain == Domain::Tabular ? scan_bounds(toks) : BoundScan{std::nullopt, std::vector<bool>(toks.size())};
  const auto matches = find_actions(toks, scan.consumed, lexicon, domain);
  if (matches.empty()) throw Error(ErrorCode::NoActionFound, "no supported action in '" + std::string(property_text) + "'");
  std::set<Operation> actions;
  for (const auto& m : matches) actions.insert(m.action);
  if (actions.size() > 1) {
    std::string names;
    for (auto a : actions) names += (names.empty() ? "" : ", ") + std::string(to_string(a));
    throw Error(ErrorCode::ConflictingActions, "property mentions several actions: " + names);
  }

  SemanticSpec spec;
  spec.operation = *actions.begin();
  spec.domain_hint = domain;

  if (domain == Domain::Tabular) {
    spec.objects = find_attributes(property_text, config);
    spec.bound = scan.bound;
  } else {
    std::vector<bool> removed = scan.consumed;
    std::size_t anchor = toks.size();
    for (const auto& m : matches) {
      for (auto t : m.tokens) {
        removed[t] = true;
        anchor = std::min(anchor, t);
      }
    }
    auto phrases = extract_object_phrases(toks, removed, anchor);
    for (auto& p : phrases) {
      std::string obj = config.mode == ParserMode::Minimal ? head_noun(p) : p;
      if (std::find(spec.objects.begin(), spec.objects.end(), obj) == spec.objects.end()) {
        spec.objects.push_back(std::move(obj));
      }
    }
  }
  if (spec.objects.empty()) {
    throw Error(ErrorCode::NoObjectFound, "no object phrase in '" + std::string(property_text) + "'");
  }
  validate(spec);
  return ParseResult{spec, rules_raw_response(spec, config.prompt_template), 0.0};
}

ParseResult parse(std::string_view property_text, const ParserConfig& config, const Lexicon& lexicon,
                  ChatTransport* transport) {
  if (config.backend == ParserBackend::Rules) {
    // latency covers the backend call only
    const auto t0 = std::chrono::steady_clock::now();
    auto res = parse_rules(property_text, config, lexicon);
    res.latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }
  if (!transport) throw Error(ErrorCode::InvalidArgument, "llm backend needs a transport");
  return parse_llm(property_text, config, *transport);
}

}  // namespace semground
