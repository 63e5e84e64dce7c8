// Command-line entry point: parse/validate/translate descriptions, evaluate
// them, split across items, verify equivalence, run item sets concurrently,
// validate traces, compare pooling conventions, export DOT.
//
// Exit codes: 0 success, 2 validation failure, 3 missing resource,
// 4 semantic/equivalence failure, 5 runtime deadlock.
#include <CLI11.hpp>
#include <json.hpp>

#include <nnefx/nnefx.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nnefx;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kMissingResource = 3;
constexpr int kSemantic = 4;
constexpr int kDeadlock = 5;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::MissingWeight:
    case ErrorKind::MissingInput:
    case ErrorKind::IoError:
      return kMissingResource;
    case ErrorKind::DeadlockDetected:
      return kDeadlock;
    default:
      return kValidation;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Model files are auto-detected: a `graphitem` header marks an item file.
struct Loaded {
  std::optional<NnefProgram> plain;
  std::vector<ItemProgram> items;
  bool is_items() const { return !items.empty(); }
};

Loaded load_models(const std::vector<std::string>& paths) {
  Loaded l;
  for (const auto& path : paths) {
    auto [program, item] = parse_any(slurp(path));
    if (item) {
      if (l.plain)
        throw Error(ErrorKind::ValidationError,
                    "cannot mix item files and a plain description ('" + path + "')");
      l.items.push_back(ItemProgram{std::move(program), std::move(*item)});
    } else {
      if (l.plain || !l.items.empty())
        throw Error(ErrorKind::ValidationError,
                    "'" + path + "' is a plain description; pass it alone");
      l.plain = std::move(program);
    }
  }
  return l;
}

void require_valid(const ValidationReport& report) {
  if (!report.ok()) throw Error(ErrorKind::ValidationError, "validation failed:\n" + report.to_text());
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + "]";
}

uint64_t sum_tokens(const std::vector<uint32_t>& marking) {
  uint64_t total = 0;
  for (uint32_t v : marking) total += v;
  return total;
}

// Inputs: a directory of <external>.nwt files, or a single file when the
// description has exactly one external.
TensorMap load_inputs(const std::string& path, const NnefProgram& program) {
  std::vector<std::string> externals;
  for (const auto& instr : program.instructions)
    if (instr.op == Op::External) externals.push_back(instr.result);
  TensorMap inputs;
  if (fs::is_directory(path)) {
    for (const auto& name : externals) {
      fs::path file = fs::path(path) / (name + ".nwt");
      if (!fs::exists(file))
        throw Error(ErrorKind::MissingInput, "no input file for '" + name + "' (" + file.string() + ")");
      inputs.emplace(name, read_tensor_file(file));
    }
  } else {
    if (externals.size() != 1)
      throw Error(ErrorKind::MissingInput,
                  "description has " + std::to_string(externals.size()) +
                      " externals; --input must be a directory of <name>.nwt files");
    if (!fs::exists(path)) throw Error(ErrorKind::MissingInput, "'" + path + "' does not exist");
    inputs.emplace(externals[0], read_tensor_file(path));
  }
  return inputs;
}

void write_outputs(const std::string& dir, const TensorMap& outputs) {
  fs::create_directories(dir);
  for (const auto& [name, tensor] : outputs) write_tensor_file(fs::path(dir) / (name + ".nwt"), tensor);
}

json marking_graph_json(const MarkingGraph& g, const std::vector<std::string>& places,
                        const std::vector<std::string>& transitions) {
  json nodes = json::array();
  for (const auto& m : g.markings) nodes.push_back(m);
  json edges = json::array();
  for (size_t n = 0; n < g.edges.size(); ++n)
    for (const auto& [t, target] : g.edges[n])
      edges.push_back({{"from", n},
                       {"to", target},
                       {"transition", transitions[static_cast<size_t>(t)]}});
  return json{{"places", places},
              {"initial", g.initial},
              {"truncated", g.truncated},
              {"markings", nodes},
              {"edges", edges}};
}

struct CheckOptions {
  std::string model;
  size_t cap = kDefaultPathCap;
  std::string dump_graph;
  bool as_json = false;
};

int cmd_check(const CheckOptions& opt) {
  Loaded l = load_models({opt.model});
  json report;
  if (l.is_items()) {
    ValidationReport v = validate_items(l.items);
    if (!v.ok()) {
      std::cout << "violations:\n" << v.to_text();
      return kValidation;
    }
    ColouredPetriNet net = translate_multi(l.items);
    MarkingGraph g = build_marking_graph(net);
    size_t terminal = 0, dead = 0;
    for (size_t n = 0; n < g.edges.size(); ++n) {
      if (!g.edges[n].empty()) continue;
      ++terminal;
      if (g.markings[n] != net.final_marking) ++dead;
    }
    report = {{"kind", "items"},
              {"name", net.name},
              {"items", net.colours},
              {"places", net.places.size()},
              {"transitions", net.transitions.size()},
              {"initial_tokens", sum_tokens(net.initial)},
              {"reachable_markings", g.markings.size()},
              {"terminal_markings", terminal},
              {"deadlocked_markings", dead},
              {"final_reachable", !net.final_unreachable && dead != terminal}};
    if (!opt.dump_graph.empty()) {
      std::vector<std::string> tnames;
      for (const auto& t : net.transitions) tnames.push_back(t.name);
      // Flat marking layout is place-major: slot names follow it.
      std::vector<std::string> pnames;
      for (const auto& p : net.places)
        for (const auto& c : net.colours) pnames.push_back(p + "@" + c);
      std::ofstream out(opt.dump_graph);
      out << marking_graph_json(g, pnames, tnames).dump(2) << '\n';
    }
    if (opt.as_json) {
      std::cout << report.dump(2) << '\n';
    } else {
      std::cout << "item set '" << net.name << "': " << net.colours.size() << " items, "
                << net.places.size() << " places, " << net.transitions.size() << " transitions, "
                << sum_tokens(net.initial) << " initial tokens\n"
                << "reachable markings: " << g.markings.size() << " (" << dead << " deadlocked)\n";
    }
    return kOk;
  }

  const NnefProgram& program = *l.plain;
  ValidationReport v = validate_ssa(program);
  if (!v.ok()) {
    std::cout << "violations:\n" << v.to_text();
    return kValidation;
  }
  infer_shapes(program);
  PetriNet net = translate(program);
  EnumerationResult res;
  bool capped = false;
  try {
    res = enumerate_paths(net, opt.cap);
  } catch (CapExceededError& e) {
    res = std::move(e.partial);
    capped = true;
  }
  report = {{"kind", "graph"},
            {"name", program.name},
            {"places", net.places.size()},
            {"transitions", net.transitions.size()},
            {"initial_tokens", net.total_tokens(net.initial)},
            {"path_count", res.path_count},
            {"paths_capped", capped || res.truncated_paths},
            {"reachable_markings", res.reachable_markings},
            {"deadlocked_markings", res.deadlocked_markings},
            {"unique_final", res.unique_final},
            {"every_path_fires_each_once", res.every_path_fires_each_once}};
  if (!opt.dump_graph.empty()) {
    std::vector<std::string> tnames;
    for (const auto& t : net.transitions) tnames.push_back(t.name);
    std::ofstream out(opt.dump_graph);
    out << marking_graph_json(res.graph, net.places, tnames).dump(2) << '\n';
  }
  if (opt.as_json) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << "graph '" << program.name << "': " << net.places.size() << " places, "
              << net.transitions.size() << " transitions, " << net.total_tokens(net.initial)
              << " initial tokens\n"
              << "valid paths: " << res.path_count << (capped ? " (list capped)" : "") << ", reachable markings: "
              << res.reachable_markings << ", unique final: " << (res.unique_final ? "yes" : "no") << '\n';
  }
  return kOk;
}

struct EvalOptions {
  std::string model, weights, input, out;
  bool as_json = false;
};

int cmd_eval(const EvalOptions& opt) {
  NnefProgram program = parse_program(slurp(opt.model));
  require_valid(validate_ssa(program));
  WeightStore weights = load_weights(opt.weights, program);
  TensorMap inputs = load_inputs(opt.input, program);
  TensorMap outputs = evaluate(program, inputs, weights);
  write_outputs(opt.out, outputs);
  if (opt.as_json) {
    json j = {{"outputs", json::object()}};
    for (const auto& [name, t] : outputs) j["outputs"][name] = {{"shape", t.shape()}};
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& [name, t] : outputs)
      std::cout << name << " " << shape_str(t.shape()) << " -> " << (fs::path(opt.out) / (name + ".nwt")).string()
                << '\n';
  }
  return kOk;
}

struct SplitOptions {
  std::string model, assignment, out;
  int suggest = 0;
  bool as_json = false;
};

int cmd_split(const SplitOptions& opt) {
  NnefProgram program = parse_program(slurp(opt.model));
  require_valid(validate_ssa(program));

  if (opt.suggest > 0) {
    std::vector<Assignment> candidates = suggest_assignments(program, opt.suggest);
    json j = json::array();
    for (const auto& a : candidates) j.push_back(assignment_to_json(a));
    std::cout << j.dump(2) << '\n';
    return kOk;
  }

  if (opt.assignment.empty())
    throw Error(ErrorKind::InvalidAssignment, "split needs --assignment (or --suggest N)");
  Assignment assignment = read_assignment_file(opt.assignment);
  std::vector<ItemProgram> items = split(program, assignment);
  require_valid(validate_items(items));

  // Union property: merging the written items yields the original
  // instruction set (sync instructions removed).
  NnefProgram merged = merge(items);
  std::multiset<std::string> original_lines, merged_lines;
  for (const auto& instr : program.instructions) original_lines.insert(detail::render_instruction(instr));
  for (const auto& instr : merged.instructions) merged_lines.insert(detail::render_instruction(instr));
  if (original_lines != merged_lines)
    throw Error(ErrorKind::ValidationError, "merged items do not reproduce the original instruction set");

  fs::create_directories(opt.out);
  json files = json::array();
  for (const auto& item : items) {
    fs::path file = fs::path(opt.out) / (item.item.item_id + ".nnef");
    std::ofstream os(file, std::ios::binary);
    os << serialize(item);
    files.push_back(file.string());
  }
  if (opt.as_json) {
    std::cout << json{{"items", files}, {"union_property", "ok"}}.dump(2) << '\n';
  } else {
    for (const auto& f : files) std::cout << "wrote " << f.get<std::string>() << '\n';
    std::cout << "union property: merged items reproduce the original instruction set\n";
  }
  return kOk;
}

struct VerifyOptions {
  std::vector<std::string> items;
  std::string original;
  size_t cap = kDefaultMarkingCap;
  bool as_json = false;
};

int cmd_verify(const VerifyOptions& opt) {
  Loaded l = load_models(opt.items);
  if (!l.is_items()) throw Error(ErrorKind::ValidationError, "verify expects item files");
  NnefProgram original = parse_program(slurp(opt.original));
  require_valid(validate_ssa(original));
  // No strict item-set validation here: a mutated set (for example a deleted
  // send_var) must still reach the equivalence check and fail it.
  ColouredPetriNet coloured = translate_multi(l.items);
  PetriNet plain = translate(original);
  EquivalenceVerdict verdict = check_equivalence(coloured, plain, opt.cap);
  if (opt.as_json) {
    std::cout << json{{"equivalent", verdict.equivalent},
                      {"message", verdict.message},
                      {"counterexample", verdict.counterexample}}
                     .dump(2)
              << '\n';
  } else if (verdict.equivalent) {
    std::cout << "EQUIVALENT: " << verdict.message << '\n';
  } else {
    std::cout << "NOT-EQUIVALENT: " << verdict.message << '\n';
    if (!verdict.counterexample.empty()) {
      std::cout << "counterexample:";
      for (const auto& t : verdict.counterexample) std::cout << ' ' << t;
      std::cout << '\n';
    }
  }
  return verdict.equivalent ? kOk : kSemantic;
}

struct RunOptions {
  std::vector<std::string> items;
  std::string weights, input, out, trace, noise;
  bool barrier = false;
  size_t cap = kDefaultMarkingCap;
  bool as_json = false;
};

int cmd_run(const RunOptions& opt) {
  Loaded l = load_models(opt.items);
  std::vector<ItemProgram> items;
  if (l.is_items()) {
    items = std::move(l.items);
  } else {
    // A plain description runs as a single-item set.
    items.push_back(ItemProgram{*l.plain, GraphItemDecl{"item1", l.plain->name, l.plain->inputs, l.plain->outputs}});
  }
  require_valid(validate_items(items));
  NnefProgram merged = merge(items);
  require_valid(validate_ssa(merged));
  WeightStore weights = load_weights(opt.weights, merged);
  TensorMap inputs = load_inputs(opt.input, merged);
  NoiseConfig noise;
  if (!opt.noise.empty()) noise = read_noise_file(opt.noise);

  RunResult result;
  bool barrier_used = false;
  if (opt.barrier) {
    if (!noise.empty())
      throw Error(ErrorKind::ValidationError, "--noise applies to the free-running scheduler, not --barrier");
    try {
      result = run_barrier_schedule(items, inputs, weights);
      barrier_used = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ShapeUnsupported) throw;
      std::cerr << "warning: " << e.what() << "; falling back to the free-running scheduler\n";
      result = run_items(items, inputs, weights);
    }
  } else {
    result = run_items(items, inputs, weights, noise);
  }

  write_outputs(opt.out, result.outputs);
  if (!opt.trace.empty()) write_trace_file(opt.trace, result.trace);

  // Self-check: outputs equal the sequential evaluation bit for bit, and the
  // recorded trace is a valid execution of the item set's net.
  TensorMap reference = evaluate(merged, inputs, weights);
  bool functional_ok = reference.size() == result.outputs.size();
  for (const auto& [name, tensor] : reference) {
    auto it = result.outputs.find(name);
    functional_ok = functional_ok && it != result.outputs.end() && bitwise_equal(it->second, tensor);
  }
  ColouredPetriNet net = translate_multi(items);
  TraceVerdict trace_verdict = validate_trace(net, result.trace, opt.cap);

  json report = {{"outputs", json::object()},
                 {"functional_match", functional_ok},
                 {"trace_accepted", trace_verdict.accepted},
                 {"trace_message", trace_verdict.message},
                 {"scheduler", barrier_used ? "barrier" : "free-running"},
                 {"rendezvous", result.rendezvous},
                 {"events", result.trace.size()}};
  for (const auto& [name, t] : result.outputs) report["outputs"][name] = {{"shape", t.shape()}};
  if (opt.as_json) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << "ran " << items.size() << " item(s), " << result.trace.size() << " trace events ("
              << (barrier_used ? "barrier" : "free-running") << " scheduler)\n"
              << "functional check: " << (functional_ok ? "outputs match sequential evaluation" : "MISMATCH")
              << '\n'
              << "trace check: " << (trace_verdict.accepted ? "accepted" : "REJECTED") << " ("
              << trace_verdict.message << ")\n";
  }
  return functional_ok && trace_verdict.accepted ? kOk : kSemantic;
}

struct TraceValidateOptions {
  std::vector<std::string> models;
  std::string trace;
  size_t cap = kDefaultMarkingCap;
  bool as_json = false;
};

int cmd_trace_validate(const TraceValidateOptions& opt) {
  Loaded l = load_models(opt.models);
  Trace trace = read_trace_file(opt.trace);
  if (auto issue = trace_pairing_issue(trace)) {
    std::cout << "REJECTED: " << *issue << '\n';
    return kSemantic;
  }
  TraceVerdict verdict;
  if (l.is_items()) {
    require_valid(validate_items(l.items));
    verdict = validate_trace(translate_multi(l.items), trace, opt.cap);
  } else {
    require_valid(validate_ssa(*l.plain));
    verdict = validate_trace(translate(*l.plain), trace, opt.cap);
  }
  json report = {{"accepted", verdict.accepted},
                 {"reached_final", verdict.reached_final},
                 {"complete", verdict.complete},
                 {"message", verdict.message}};
  if (verdict.violating_event) report["violating_event"] = *verdict.violating_event;
  if (opt.as_json) {
    std::cout << report.dump(2) << '\n';
  } else if (verdict.accepted) {
    std::cout << "ACCEPTED: " << verdict.message << '\n';
    if (!verdict.reached_final) std::cout << "warning: NOT-FINAL (the trace is a valid prefix)\n";
  } else {
    std::cout << "REJECTED: " << verdict.message << '\n';
    if (verdict.violating_event) {
      const TraceEvent& ev = trace[*verdict.violating_event];
      std::cout << "violating event #" << *verdict.violating_event << ": item=" << ev.item
                << " transition=" << ev.transition << " kind=" << to_string(ev.kind) << " t_ns=" << ev.t_ns
                << '\n';
    }
  }
  return verdict.accepted ? kOk : kSemantic;
}

struct DiffOptions {
  std::string a = "keras:same", b = "pytorch:0";
  std::vector<int64_t> size = {2, 2}, stride = {2, 2};
  std::vector<int64_t> input_hw;
  bool as_json = false;
};

PoolEncoding parse_convention(const std::string& spec, int64_t k_h, int64_t k_w, int64_t s_h, int64_t s_w) {
  auto colon = spec.find(':');
  std::string fw = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (fw == "keras") {
    if (arg != "same" && arg != "valid")
      throw Error(ErrorKind::ValidationError, "keras mode must be 'same' or 'valid', got '" + arg + "'");
    return keras_max_pool(k_h, k_w, s_h, s_w, arg);
  }
  if (fw == "pytorch") {
    int64_t pad = 0;
    if (!arg.empty()) {
      try {
        pad = std::stoll(arg);
      } catch (...) {
        throw Error(ErrorKind::ValidationError, "pytorch padding must be an integer, got '" + arg + "'");
      }
    }
    return pytorch_max_pool(k_h, k_w, s_h, s_w, pad);
  }
  throw Error(ErrorKind::ValidationError, "unknown convention '" + fw + "' (use keras:MODE or pytorch:PAD)");
}

int cmd_diff(const DiffOptions& opt) {
  if (opt.size.size() != 2 || opt.stride.size() != 2)
    throw Error(ErrorKind::ValidationError, "--size and --stride take two integers: H W");
  PoolEncoding a = parse_convention(opt.a, opt.size[0], opt.size[1], opt.stride[0], opt.stride[1]);
  PoolEncoding b = parse_convention(opt.b, opt.size[0], opt.size[1], opt.stride[0], opt.stride[1]);
  std::optional<std::pair<int64_t, int64_t>> hw;
  if (!opt.input_hw.empty()) {
    if (opt.input_hw.size() != 2)
      throw Error(ErrorKind::ValidationError, "--input-hw takes two integers: H W");
    hw = {opt.input_hw[0], opt.input_hw[1]};
  }
  ConventionReport report = compare_conventions(a, b, hw);
  if (opt.as_json) {
    json j = {{"a", {{"framework", a.framework}, {"mode", a.mode}, {"fragment", pool_nnef_fragment(a)}}},
              {"b", {{"framework", b.framework}, {"mode", b.mode}, {"fragment", pool_nnef_fragment(b)}}},
              {"arguments_equal", report.arguments_equal},
              {"diverges", report.diverges}};
    if (hw) {
      j["a"]["output_shape"] = *report.shape_a;
      j["b"]["output_shape"] = *report.shape_b;
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "A (" << a.framework << " " << a.mode << "):\n  " << pool_nnef_fragment(a) << '\n';
    if (hw) std::cout << "  output shape on 1x" << hw->first << "x" << hw->second << ": " << shape_str(*report.shape_a) << '\n';
    std::cout << "B (" << b.framework << " " << b.mode << "):\n  " << pool_nnef_fragment(b) << '\n';
    if (hw) std::cout << "  output shape on 1x" << hw->first << "x" << hw->second << ": " << shape_str(*report.shape_b) << '\n';
    std::cout << "arguments: " << (report.arguments_equal ? "equal" : "different") << '\n';
    std::cout << "semantics: " << (report.diverges ? "DIVERGE" : "agree") << '\n';
  }
  return kOk;
}

struct DotOptions {
  std::vector<std::string> models;
  std::string out;
};

int cmd_dot(const DotOptions& opt) {
  Loaded l = load_models(opt.models);
  std::string dot;
  if (l.is_items()) {
    require_valid(validate_items(l.items));
    dot = export_dot(translate_multi(l.items));
  } else {
    require_valid(validate_ssa(*l.plain));
    dot = export_dot(translate(*l.plain));
  }
  if (opt.out.empty()) {
    std::cout << dot;
  } else {
    std::ofstream os(opt.out, std::ios::binary);
    if (!os) throw Error(ErrorKind::IoError, "cannot write '" + opt.out + "'");
    os << dot;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NNEF subset toolchain: functional and Petri net semantics, item splitting, concurrent execution"};
  app.require_subcommand(1);

  CheckOptions check_opt;
  auto* check = app.add_subcommand("check", "Parse, validate and translate a description or item set");
  check->add_option("model", check_opt.model, "NNEF file (plain or item form)")->required();
  check->add_option("--cap", check_opt.cap, "path enumeration cap");
  check->add_option("--dump-graph", check_opt.dump_graph, "write the marking graph as JSON to this file");
  check->add_flag("--json", check_opt.as_json, "machine-readable report");

  EvalOptions eval_opt;
  auto* eval = app.add_subcommand("eval", "Evaluate a description sequentially");
  eval->add_option("model", eval_opt.model, "NNEF file")->required();
  eval->add_option("--weights", eval_opt.weights, "directory of <label>.nwt files")->required();
  eval->add_option("--input", eval_opt.input, "input tensor file or directory")->required();
  eval->add_option("--out", eval_opt.out, "output directory")->required();
  eval->add_flag("--json", eval_opt.as_json, "machine-readable report");

  SplitOptions split_opt;
  auto* split_cmd = app.add_subcommand("split", "Split a description into per-item files");
  split_cmd->add_option("model", split_opt.model, "NNEF file")->required();
  split_cmd->add_option("--assignment", split_opt.assignment, "assignment JSON file");
  split_cmd->add_option("--out", split_opt.out, "output directory for item files");
  split_cmd->add_option("--suggest", split_opt.suggest, "print candidate assignments for N items and exit");
  split_cmd->add_flag("--json", split_opt.as_json, "machine-readable report");

  VerifyOptions verify_opt;
  auto* verify = app.add_subcommand("verify", "Check an item set against the original description");
  verify->add_option("items", verify_opt.items, "item NNEF files")->required()->expected(-1);
  verify->add_option("--original", verify_opt.original, "original NNEF file")->required();
  verify->add_option("--cap", verify_opt.cap, "marking exploration cap");
  verify->add_flag("--json", verify_opt.as_json, "machine-readable report");

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run an item set concurrently and self-validate");
  run->add_option("items", run_opt.items, "item NNEF files (or one plain file)")->required()->expected(-1);
  run->add_option("--weights", run_opt.weights, "directory of <label>.nwt files")->required();
  run->add_option("--input", run_opt.input, "input tensor file or directory")->required();
  run->add_option("--out", run_opt.out, "output directory")->required();
  run->add_option("--trace", run_opt.trace, "write the event trace (JSON lines) to this file");
  run->add_option("--noise", run_opt.noise, "noise configuration JSON file");
  run->add_option("--cap", run_opt.cap, "marking exploration cap for the trace check");
  run->add_flag("--barrier", run_opt.barrier, "use the barrier schedule (falls back if the shape does not fit)");
  run->add_flag("--json", run_opt.as_json, "machine-readable report");

  TraceValidateOptions tv_opt;
  auto* tv = app.add_subcommand("trace-validate", "Replay a recorded trace against a description or item set");
  tv->add_option("models", tv_opt.models, "NNEF files (plain or item form)")->required()->expected(-1);
  tv->add_option("--trace", tv_opt.trace, "trace file (JSON lines)")->required();
  tv->add_option("--cap", tv_opt.cap, "marking exploration cap");
  tv->add_flag("--json", tv_opt.as_json, "machine-readable report");

  DiffOptions diff_opt;
  auto* diff = app.add_subcommand("diff", "Compare two max_pool conventions");
  diff->add_option("--a", diff_opt.a, "first convention: keras:same|keras:valid|pytorch:PAD");
  diff->add_option("--b", diff_opt.b, "second convention");
  diff->add_option("--size", diff_opt.size, "pool window H W")->expected(2);
  diff->add_option("--stride", diff_opt.stride, "pool stride H W")->expected(2);
  diff->add_option("--input-hw", diff_opt.input_hw, "input height and width for shape comparison")->expected(2);
  diff->add_flag("--json", diff_opt.as_json, "machine-readable report");

  DotOptions dot_opt;
  auto* dot = app.add_subcommand("dot", "Export the translated net as Graphviz DOT");
  dot->add_option("models", dot_opt.models, "NNEF files (plain or item form)")->required()->expected(-1);
  dot->add_option("--out", dot_opt.out, "output file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(check_opt);
    if (*eval) return cmd_eval(eval_opt);
    if (*split_cmd) return cmd_split(split_opt);
    if (*verify) return cmd_verify(verify_opt);
    if (*run) return cmd_run(run_opt);
    if (*tv) return cmd_trace_validate(tv_opt);
    if (*diff) return cmd_diff(diff_opt);
    if (*dot) return cmd_dot(dot_opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}
