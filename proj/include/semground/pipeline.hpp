#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "semground/detection.hpp"
#include "semground/error.hpp"
#include "semground/json_io.hpp"
#include "semground/network.hpp"
#include "semground/parser.hpp"
#include "semground/spec_generator.hpp"
#include "semground/tabular.hpp"
#include "semground/verifier.hpp"

namespace semground {

inline constexpr int kReportSchemaVersion = 1;

/// Error tagged with the pipeline stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const Error& cause)
      : std::runtime_error(stage + ": " + cause.what()), stage_(std::move(stage)), code_(cause.code()) {}

  const std::string& stage() const noexcept { return stage_; }
  ErrorCode code() const noexcept { return code_; }

 private:
  std::string stage_;
  ErrorCode code_;
};

struct PipelineOptions {
  Domain domain = Domain::Image;
  ParserConfig parser;
  DetectorConfig detector = DetectorConfig::for_mode(Tightness::Tight);
  TabularOptions tabular;
  OpParams op_params;
  VerifierConfig verifier;
};

/// Backends the stages draw on. Only the ones the domain needs must be set.
struct PipelineResources {
  const Lexicon* lexicon = nullptr;
  ChatTransport* chat = nullptr;
  DetectionService* detector = nullptr;
  const DatasetSchema* schema = nullptr;
  const AudioIntervalFixture* audio = nullptr;
};

enum class ApprovalStatus { Approved, Rejected };

struct ApprovalDecision {
  ApprovalStatus status = ApprovalStatus::Rejected;
  /// Replacement regions chosen by the reviewer (source user_edited).
  std::optional<Grounding> edited;
  std::string method;
};

using ApprovalGate =
    std::function<ApprovalDecision(const InputSample&, const SemanticSpec&, const Grounding&)>;

ApprovalGate auto_approve_gate();
/// Lists the regions on `out` and reads y/n from `in`; EOF rejects.
ApprovalGate terminal_gate(std::istream& in, std::ostream& out);

// Individual stages; each wraps failures in StageError.
ParseResult stage_parse(const std::string& property, const PipelineOptions& opts, const PipelineResources& res);
Grounding stage_ground(const SemanticSpec& spec, const InputSample& x, const PipelineOptions& opts,
                       const PipelineResources& res);
GroundedSpec stage_generate(const InputSample& x, const Grounding& g, const SemanticSpec& spec,
                            const OpParams& params, const Network& net);
Verdict stage_verify(const Network& net, const GroundedSpec& spec, const VerifierConfig& cfg);

json parse_result_to_json(const ParseResult& r, const ParserConfig& cfg);
ParseResult parse_result_from_json(const json& j);

struct RunOutcome {
  Verdict verdict;
  json report;
};

/// parse -> ground -> approval -> generate -> verify. A rejected approval
/// yields UNKNOWN without generating a spec.
RunOutcome run_pipeline(const std::string& property, const InputSample& x, const Network& net,
                        const PipelineOptions& opts, const PipelineResources& res, const ApprovalGate& gate);

/// 0 SAFE, 1 UNSAFE, 2 UNKNOWN.
int exit_code_for(VerdictStatus s);
inline constexpr int kExitStageError = 3;
inline constexpr int kExitUsageError = 4;

}  // namespace semground
