#include "semground/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>

#include "semground/text.hpp"

namespace semground {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::string describe(const Region& r) {
  return std::visit(
      [&](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        char buf[160];
        if constexpr (std::is_same_v<T, FeatureRange>) {
          std::snprintf(buf, sizeof buf, "feature %zu in [%.6g, %.6g]", e.index, e.lower, e.upper);
        } else if constexpr (std::is_same_v<T, PixelBox>) {
          std::snprintf(buf, sizeof buf, "pixels x[%lld,%lld) y[%lld,%lld)", static_cast<long long>(e.x1),
                        static_cast<long long>(e.x2), static_cast<long long>(e.y1), static_cast<long long>(e.y2));
        } else {
          std::snprintf(buf, sizeof buf, "samples [%lld,%lld)", static_cast<long long>(e.t_start),
                        static_cast<long long>(e.t_end));
        }
        return buf;
      },
      r.extent);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ApprovalGate auto_approve_gate() {
  return [](const InputSample&, const SemanticSpec&, const Grounding&) {
    return ApprovalDecision{ApprovalStatus::Approved, std::nullopt, "auto"};
  };
}

ApprovalGate terminal_gate(std::istream& in, std::ostream& out) {
  return [&in, &out](const InputSample& x, const SemanticSpec& spec, const Grounding& g) {
    out << "Input '" << x.id << "', action " << to_string(spec.operation) << ", " << g.regions.size()
        << " region(s):\n";
    for (std::size_t i = 0; i < g.regions.size(); ++i) {
      const auto& r = g.regions[i];
      out << "  [" << i << "] " << r.label << ": " << describe(r) << " (score " << r.score << ")\n";
    }
    out << "Approve these regions? [y/N] " << std::flush;
    std::string answer;
    if (!std::getline(in, answer)) answer.clear();
    const auto a = text::to_lower(text::trim(answer));
    const bool yes = a == "y" || a == "yes";
    return ApprovalDecision{yes ? ApprovalStatus::Approved : ApprovalStatus::Rejected, std::nullopt, "terminal"};
  };
}

ParseResult stage_parse(const std::string& property, const PipelineOptions& opts, const PipelineResources& res) {
  return in_stage("parse", [&] {
    ParserConfig cfg = opts.parser;
    cfg.prompt_template = prompt_template_for(opts.domain);
    if (opts.domain == Domain::Tabular && cfg.attributes.empty() && res.schema) {
      for (const auto& a : res.schema->attributes()) cfg.attributes.push_back({a.name, a.aliases});
    }
    if (cfg.backend == ParserBackend::Rules && !res.lexicon) {
      throw Error(ErrorCode::InvalidArgument, "rule backend needs a lexicon");
    }
    static const Lexicon empty;
    return parse(property, cfg, res.lexicon ? *res.lexicon : empty, res.chat);
  });
}

Grounding stage_ground(const SemanticSpec& spec, const InputSample& x, const PipelineOptions& opts,
                       const PipelineResources& res) {
  return in_stage("grounding", [&] {
    if (spec.domain_hint != domain_of(x.kind)) {
      throw Error(ErrorCode::InvalidArgument, "parsed action is for " + std::string(to_string(spec.domain_hint)) +
                                                  " inputs but the input is " + std::string(to_string(x.kind)));
    }
    switch (spec.domain_hint) {
      case Domain::Tabular:
        if (!res.schema) throw Error(ErrorCode::InvalidArgument, "tabular grounding needs a schema");
        return ground_tabular(spec, x, *res.schema, opts.tabular);
      case Domain::Image:
        if (!res.detector) throw Error(ErrorCode::InvalidArgument, "image grounding needs a detection service");
        return ground_image(spec, x, opts.detector, *res.detector);
      case Domain::Audio:
        if (!res.audio) throw Error(ErrorCode::InvalidArgument, "audio grounding needs an interval fixture");
        return res.audio->ground(spec, x);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown domain");
  });
}

GroundedSpec stage_generate(const InputSample& x, const Grounding& g, const SemanticSpec& spec,
                            const OpParams& params, const Network& net) {
  return in_stage("generate", [&] { return generate(x, g, spec, params, net); });
}

Verdict stage_verify(const Network& net, const GroundedSpec& spec, const VerifierConfig& cfg) {
  return in_stage("verify", [&] { return verify(net, spec, cfg); });
}

json parse_result_to_json(const ParseResult& r, const ParserConfig& cfg) {
  return json{{"spec", r.spec},
              {"raw_response", r.raw_response},
              {"latency", r.latency},
              {"backend", to_string(cfg.backend)},
              {"mode", to_string(cfg.mode)}};
}

ParseResult parse_result_from_json(const json& j) {
  try {
    return ParseResult{j.at("spec").get<SemanticSpec>(), j.value("raw_response", std::string{}),
                       j.value("latency", 0.0)};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("parse artifact: ") + e.what());
  }
}

int exit_code_for(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Safe: return 0;
    case VerdictStatus::Unsafe: return 1;
    case VerdictStatus::Unknown: return 2;
  }
  return 2;
}

RunOutcome run_pipeline(const std::string& property, const InputSample& x, const Network& net,
                        const PipelineOptions& opts, const PipelineResources& res, const ApprovalGate& gate) {
  RunOutcome out;
  json& report = out.report;
  report["schema"] = kReportSchemaVersion;
  report["created_at"] = utc_timestamp();
  report["property"] = property;
  report["domain"] = to_string(opts.domain);
  report["input"] = x;
  report["timings"] = json::object();

  auto t0 = Clock::now();
  const auto parsed = stage_parse(property, opts, res);
  report["timings"]["parse"] = seconds_since(t0);
  report["parse"] = parse_result_to_json(parsed, opts.parser);

  t0 = Clock::now();
  Grounding grounding = stage_ground(parsed.spec, x, opts, res);
  report["timings"]["ground"] = seconds_since(t0);
  report["grounding"] = grounding;

  const auto decision = gate(x, parsed.spec, grounding);
  report["approval"] = {{"status", decision.status == ApprovalStatus::Approved ? "approved" : "rejected"},
                        {"method", decision.method}};
  if (decision.status == ApprovalStatus::Rejected) {
    out.verdict.status = VerdictStatus::Unknown;
    out.verdict.reason = decision.method == "review-timeout" ? "approval timed out" : "regions rejected at approval";
    report["grounded_spec"] = nullptr;
    report["verdict"] = out.verdict;
    return out;
  }
  if (decision.edited) {
    grounding = *decision.edited;
    grounding.source = GroundingSource::UserEdited;
    in_stage("approval", [&] {
      validate(grounding, x);
      return 0;
    });
    report["approval"]["edited_grounding"] = grounding;
  }

  t0 = Clock::now();
  const auto gspec = stage_generate(x, grounding, parsed.spec, opts.op_params, net);
  report["timings"]["generate"] = seconds_since(t0);
  report["grounded_spec"] = gspec;

  t0 = Clock::now();
  out.verdict = stage_verify(net, gspec, opts.verifier);
  report["timings"]["verify"] = seconds_since(t0);
  report["verdict"] = out.verdict;
  return out;
}

}  // namespace semground
