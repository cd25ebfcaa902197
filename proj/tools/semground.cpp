// semground command-line front end: the end-to-end pipeline, its individual
// stages, and the parser/detector evaluation harness.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "semground/backends.hpp"
#include "semground/eval.hpp"
#include "semground/pipeline.hpp"
#include "semground/review_server.hpp"

using namespace semground;

namespace {

struct Flags {
  std::string domain;
  std::string parser = "rules";
  std::string mode = "detailed";
  std::string tightness = "tight";
  double epsilon = OpParams{}.epsilon;
  double beta = OpParams{}.beta;
  double gain = OpParams{}.gain;
  double mask = OpParams{}.mask_value;
  double contrast = std::numeric_limits<double>::quiet_NaN();
  bool remove_free = false;
  double delta = TabularOptions{}.delta;

  std::string lexicon;
  std::string schema;
  std::string fixtures;
  std::string llm_endpoint;
  std::string llm_model;
  std::string llm_api_key_env = "OPENAI_API_KEY";
  std::string detector_endpoint;

  std::uint64_t max_nodes = VerifierConfig{}.max_nodes;
  int workers = 1;

  bool yes = false;
  bool review = false;
  int review_port = 0;
  double review_timeout = 600.0;
  std::string review_assets;

  std::string report_out;
  std::string export_vnnlib;
  std::string out;

  // stage inputs
  std::string property;
  std::string input;
  std::string net;
  std::string parse_file;
  std::string grounding_file;
  std::string spec_file;
  std::string eval_file;
  double iou_threshold = 0.5;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_parser_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--parser", f.parser, "Parser backend")->check(CLI::IsMember({"rules", "llm"}));
  cmd->add_option("--lexicon", f.lexicon, "Action trigger lexicon (rules backend)");
  cmd->add_option("--llm-endpoint", f.llm_endpoint, "Chat completions URL (llm backend)");
  cmd->add_option("--llm-model", f.llm_model, "Chat model name");
  cmd->add_option("--llm-api-key-env", f.llm_api_key_env, "Environment variable holding the API key");
}

void add_domain_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--domain", f.domain, "Input domain (default: from the input kind)")
      ->check(CLI::IsMember({"tabular", "image", "audio"}));
  cmd->add_option("--schema", f.schema, "Tabular dataset schema");
  cmd->add_option("--fixtures", f.fixtures, "Directory of recorded model outputs to replay");
}

void add_mode_flag(CLI::App* cmd, Flags& f) {
  cmd->add_option("--mode", f.mode, "Parser output granularity")->check(CLI::IsMember({"detailed", "minimal"}));
}

void add_grounding_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--tightness", f.tightness, "Detector thresholds")->check(CLI::IsMember({"tight", "loose"}));
  cmd->add_option("--detector-endpoint", f.detector_endpoint, "Detection service URL");
  cmd->add_option("--delta", f.delta, "Tabular window for increase/decrease/change");
}

void add_op_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--epsilon", f.epsilon, "add_noise half-width");
  cmd->add_option("--beta", f.beta, "Brightness shift");
  cmd->add_option("--gain", f.gain, "Amplify gain");
  cmd->add_option("--mask", f.mask, "Value written by remove");
  cmd->add_option("--contrast", f.contrast, "Contrast factor (default 1.5 / 0.5)");
  cmd->add_flag("--remove-free", f.remove_free, "remove frees the region to [0,1]");
}

void add_verifier_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--max-nodes", f.max_nodes, "Branch-and-bound node budget");
  cmd->add_option("--workers", f.workers, "Parallel branch-and-bound workers");
}

PipelineOptions pipeline_options(const Flags& f, Domain domain) {
  PipelineOptions o;
  o.domain = domain;
  o.parser.backend = parser_backend_from_string(f.parser);
  o.parser.mode = parser_mode_from_string(f.mode);
  o.parser.prompt_template = prompt_template_for(domain);
  o.parser.llm_endpoint = f.llm_endpoint;
  o.parser.llm_model = f.llm_model;
  o.parser.llm_api_key_env = f.llm_api_key_env;
  o.detector = DetectorConfig::for_mode(tightness_from_string(f.tightness));
  o.detector.endpoint = f.detector_endpoint;
  o.tabular.delta = f.delta;
  o.op_params.epsilon = f.epsilon;
  o.op_params.beta = f.beta;
  o.op_params.gain = f.gain;
  o.op_params.mask_value = f.mask;
  if (!std::isnan(f.contrast)) o.op_params.contrast_factor = f.contrast;
  o.op_params.remove_free = f.remove_free;
  o.verifier.max_nodes = f.max_nodes;
  o.verifier.parallel_workers = f.workers;
  validate(o.op_params);
  validate(o.verifier);
  return o;
}

BackendSettings backend_settings(const Flags& f) {
  auto s = default_backend_settings();
  if (!f.lexicon.empty()) s.lexicon = f.lexicon;
  if (!f.schema.empty()) s.schema = f.schema;
  if (!f.fixtures.empty()) s.fixtures_dir = f.fixtures;
  return s;
}

Domain resolve_domain(const Flags& f, const InputSample* x) {
  if (f.domain.empty()) return x ? domain_of(x->kind) : Domain::Image;
  const Domain d = domain_from_string(f.domain);
  if (x && d != domain_of(x->kind)) {
    throw UsageError("--domain " + f.domain + " does not match the " + std::string(to_string(x->kind)) + " input");
  }
  return d;
}

InputSample load_input(const std::string& path) {
  auto x = load_json_as<InputSample>(path);
  validate(x);
  return x;
}

void emit_json(const json& j, const std::string& path) {
  const auto text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file_atomic(path, text);
  }
}

void print_verdict(const Verdict& v) {
  std::printf("verdict: %s  nodes=%llu  time=%.3fs", std::string(to_string(v.status)).c_str(),
              static_cast<unsigned long long>(v.nodes_explored), v.wall_time);
  if (!v.reason.empty()) std::printf("  (%s)", v.reason.c_str());
  std::printf("\n");
}

ApprovalGate approval_gate(const Flags& f) {
  if (f.yes) return auto_approve_gate();
  if (f.review) {
    std::optional<std::filesystem::path> assets;
    if (!f.review_assets.empty()) assets = f.review_assets;
    const auto ms = std::chrono::milliseconds(static_cast<long long>(f.review_timeout * 1000.0));
    return review_gate(std::cerr, ms, f.review_port, assets);
  }
  return terminal_gate(std::cin, std::cerr);
}

int cmd_run(const Flags& f) {
  const auto x = load_input(f.input);
  const auto net = load_network(f.net);
  const auto opts = pipeline_options(f, resolve_domain(f, &x));
  const Backends backends(backend_settings(f), opts);
  try {
    const auto outcome = run_pipeline(f.property, x, net, opts, backends.resources(), approval_gate(f));
    if (!f.report_out.empty()) emit_json(outcome.report, f.report_out);
    print_verdict(outcome.verdict);
    return exit_code_for(outcome.verdict.status);
  } catch (const StageError& e) {
    if (!f.report_out.empty()) {
      emit_json({{"schema", kReportSchemaVersion},
                 {"property", f.property},
                 {"input", x.id},
                 {"error", {{"stage", e.stage()}, {"code", to_string(e.code())}, {"message", e.what()}}}},
                f.report_out);
    }
    throw;
  }
}

int cmd_parse(const Flags& f) {
  const auto opts = pipeline_options(f, resolve_domain(f, nullptr));
  const Backends backends(backend_settings(f), opts);
  const auto r = stage_parse(f.property, opts, backends.resources());
  emit_json(parse_result_to_json(r, opts.parser), f.out);
  return 0;
}

int cmd_ground(const Flags& f) {
  const auto parsed = parse_result_from_json(read_json_file(f.parse_file));
  const auto x = load_input(f.input);
  const auto opts = pipeline_options(f, resolve_domain(f, &x));
  const Backends backends(backend_settings(f), opts);
  emit_json(stage_ground(parsed.spec, x, opts, backends.resources()), f.out);
  return 0;
}

int cmd_genspec(const Flags& f) {
  const auto parsed = parse_result_from_json(read_json_file(f.parse_file));
  const auto g = load_json_as<Grounding>(f.grounding_file);
  const auto x = load_input(f.input);
  const auto net = load_network(f.net);
  const auto opts = pipeline_options(f, resolve_domain(f, &x));
  emit_json(stage_generate(x, g, parsed.spec, opts.op_params, net), f.out);
  return 0;
}

GroundedSpec load_grounded_spec(const std::string& path) {
  const auto j = read_json_file(path);
  try {
    // a run report carries its spec under "grounded_spec"
    if (j.contains("grounded_spec")) {
      if (j["grounded_spec"].is_null()) throw UsageError(path + ": report has no grounded spec");
      return j["grounded_spec"].get<GroundedSpec>();
    }
    return j.get<GroundedSpec>();
  } catch (const json::exception& e) {
    rethrow_as_malformed(path, e);
  }
}

int cmd_verify(const Flags& f) {
  const auto spec = load_grounded_spec(f.spec_file);
  const auto net = load_network(f.net);
  if (!f.export_vnnlib.empty()) {
    write_text_file_atomic(f.export_vnnlib, emit_vnnlib(spec, net));
    std::printf("wrote %s\n", f.export_vnnlib.c_str());
    return 0;
  }
  VerifierConfig cfg;
  cfg.max_nodes = f.max_nodes;
  cfg.parallel_workers = f.workers;
  validate(cfg);
  const auto v = stage_verify(net, spec, cfg);
  if (!f.out.empty()) emit_json(v, f.out);
  print_verdict(v);
  return exit_code_for(v.status);
}

int cmd_eval_parse(const Flags& f, const std::vector<std::string>& modes) {
  const auto items = load_parse_fixtures(f.eval_file);
  std::vector<ParseMetrics> runs;
  for (const auto& mode : modes) {
    Flags fm = f;
    fm.mode = mode;
    auto opts = pipeline_options(fm, Domain::Tabular);
    const Backends backends(backend_settings(fm), opts);
    const auto res = backends.resources();
    for (const auto& a : res.schema->attributes()) opts.parser.attributes.push_back({a.name, a.aliases});
    static const Lexicon empty;
    runs.push_back(eval_parse(items, opts.parser, res.lexicon ? *res.lexicon : empty, res.chat));
  }
  std::cout << format_parse_table(runs);
  if (!f.report_out.empty()) {
    json j = json::array();
    for (const auto& r : runs) j.push_back(to_json(r));
    emit_json({{"schema", kReportSchemaVersion}, {"eval", "parse"}, {"runs", j}}, f.report_out);
  }
  return 0;
}

int cmd_eval_detect(const Flags& f) {
  const auto items = load_detect_fixtures(f.eval_file);
  PipelineOptions opts;
  opts.domain = Domain::Image;
  opts.detector.endpoint = f.detector_endpoint;
  const Backends backends(backend_settings(f), opts);
  const auto m = eval_detect(items, *backends.resources().detector, f.iou_threshold);
  std::cout << format_detect_table(m);
  if (!f.report_out.empty()) emit_json({{"schema", kReportSchemaVersion}, {"eval", "detect"}, {"metrics", to_json(m)}},
                                       f.report_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground natural-language properties into verification queries and check them."};
  app.require_subcommand(1);
  Flags f;
  std::string eval_modes = "both";

  auto* run = app.add_subcommand("run", "parse -> ground -> approve -> generate -> verify");
  run->add_option("property", f.property, "Property in natural language")->required();
  run->add_option("--input", f.input, "Input sample JSON")->required();
  run->add_option("--net", f.net, "Network JSON")->required();
  add_parser_flags(run, f);
  add_mode_flag(run, f);
  add_domain_flags(run, f);
  add_grounding_flags(run, f);
  add_op_flags(run, f);
  add_verifier_flags(run, f);
  run->add_flag("--yes,-y", f.yes, "Approve the proposed regions without asking");
  run->add_flag("--review", f.review, "Approve through the local review panel");
  run->add_option("--review-port", f.review_port, "Review panel port (0 picks a free one)");
  run->add_option("--review-timeout", f.review_timeout, "Seconds to wait for a review decision");
  run->add_option("--review-assets", f.review_assets, "Static files served by the review panel");
  run->add_option("--report-out", f.report_out, "Write the run report here");

  auto* parse_cmd = app.add_subcommand("parse", "Natural-language property to semantic spec");
  parse_cmd->add_option("property", f.property, "Property in natural language")->required();
  add_parser_flags(parse_cmd, f);
  add_mode_flag(parse_cmd, f);
  add_domain_flags(parse_cmd, f);
  parse_cmd->add_option("--out,-o", f.out, "Output file (default stdout)");

  auto* ground = app.add_subcommand("ground", "Semantic spec to regions on an input");
  ground->add_option("--parse", f.parse_file, "Output of `parse`")->required();
  ground->add_option("--input", f.input, "Input sample JSON")->required();
  add_domain_flags(ground, f);
  add_grounding_flags(ground, f);
  ground->add_option("--out,-o", f.out, "Output file (default stdout)");

  auto* genspec = app.add_subcommand("genspec", "Regions to a grounded box specification");
  genspec->add_option("--parse", f.parse_file, "Output of `parse`")->required();
  genspec->add_option("--grounding", f.grounding_file, "Output of `ground`")->required();
  genspec->add_option("--input", f.input, "Input sample JSON")->required();
  genspec->add_option("--net", f.net, "Network JSON")->required();
  add_op_flags(genspec, f);
  genspec->add_option("--out,-o", f.out, "Output file (default stdout)");

  auto* verify_cmd = app.add_subcommand("verify", "Check a grounded spec, or export it as VNN-LIB");
  verify_cmd->add_option("--spec", f.spec_file, "Grounded spec JSON or a run report")->required();
  verify_cmd->add_option("--net", f.net, "Network JSON")->required();
  verify_cmd->add_option("--export-vnnlib", f.export_vnnlib, "Write the VNN-LIB query instead of verifying");
  add_verifier_flags(verify_cmd, f);
  verify_cmd->add_option("--out,-o", f.out, "Write the verdict JSON here");

  auto* eval_parse_cmd = app.add_subcommand("eval-parse", "Parser accuracy and latency over labeled prompts");
  eval_parse_cmd->add_option("fixture", f.eval_file, "Labeled prompt file")->required();
  add_parser_flags(eval_parse_cmd, f);
  eval_parse_cmd->add_option("--mode", eval_modes, "Parser mode(s) to evaluate")
      ->check(CLI::IsMember({"detailed", "minimal", "both"}));
  eval_parse_cmd->add_option("--schema", f.schema, "Tabular dataset schema");
  eval_parse_cmd->add_option("--fixtures", f.fixtures, "Directory of recorded model outputs to replay");
  eval_parse_cmd->add_option("--report-out", f.report_out, "Write the metrics JSON here");

  auto* eval_detect_cmd = app.add_subcommand("eval-detect", "Detector success rate per mode and tightness");
  eval_detect_cmd->add_option("fixture", f.eval_file, "Labeled image file")->required();
  eval_detect_cmd->add_option("--fixtures", f.fixtures, "Directory of recorded model outputs to replay");
  eval_detect_cmd->add_option("--detector-endpoint", f.detector_endpoint, "Detection service URL");
  eval_detect_cmd->add_option("--iou", f.iou_threshold, "IoU needed to count a box as found");
  eval_detect_cmd->add_option("--report-out", f.report_out, "Write the metrics JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsageError;
  }

  try {
    if (*run) return cmd_run(f);
    if (*parse_cmd) return cmd_parse(f);
    if (*ground) return cmd_ground(f);
    if (*genspec) return cmd_genspec(f);
    if (*verify_cmd) return cmd_verify(f);
    if (*eval_parse_cmd) {
      if (eval_modes == "both") return cmd_eval_parse(f, {"detailed", "minimal"});
      return cmd_eval_parse(f, {eval_modes});
    }
    if (*eval_detect_cmd) return cmd_eval_detect(f);
  } catch (const StageError& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.stage().c_str(), e.what());
    return kExitStageError;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsageError;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsageError;
  }
  return kExitUsageError;
}
