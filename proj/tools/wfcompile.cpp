#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfc/inference.hpp"
#include "wfc/parser.hpp"
#include "wfc/symbolic.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonOptions {
  std::string program_path;
  std::vector<std::string> domain;
  std::string backend = "bdd";
  std::string var_order = "mention";
  std::string output_path;
};

wfc::CompileOptions compile_options(const CommonOptions& common) {
  wfc::CompileOptions options;
  options.backend = common.backend == "circuit" ? wfc::Backend::circuit : wfc::Backend::bdd;
  options.var_order =
      common.var_order == "lex" ? wfc::VarOrder::lexicographic : wfc::VarOrder::first_mention;
  return options;
}

wfc::GroundProgram load_ground(const std::string& path, const std::vector<std::string>& domain) {
  return wfc::ground(wfc::parse_program_file(path), domain);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw wfc::Error("cannot open output file: " + path);
  out << content;
}

std::string render_formula(const wfc::FormulaStore& store, wfc::FormulaRef ref) {
  // Rendering expands sharing; fall back to a size note for big circuits.
  const auto stats = store.stats(ref);
  if (stats.nodes > 4096) return "<circuit with " + std::to_string(stats.nodes) + " nodes>";
  return store.to_string(ref);
}

std::string dimacs(const wfc::CnfResult& cnf, const wfc::Alphabet& alphabet) {
  std::ostringstream os;
  for (const auto& [atom, var] : cnf.atom_vars)
    os << "c varmap " << alphabet.name(atom) << " " << var << "\n";
  os << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
  for (const auto& clause : cnf.clauses) {
    for (int lit : clause) os << lit << " ";
    os << "0\n";
  }
  return os.str();
}

wfc::WeightFunction load_weights(const std::string& path, wfc::Trace& trace, bool allow_missing) {
  wfc::WeightFunction weights =
      path.empty() ? wfc::WeightFunction{} : wfc::WeightFunction::parse_file(path);
  const wfc::Alphabet& alphabet = trace.program.alphabet();
  for (const auto& name : weights.atom_names()) {
    auto id = alphabet.find(name);
    if (!id) throw wfc::Error("weight file mentions unknown atom: " + name);
    if (alphabet.is_defined(*id)) {
      auto [wt, wf] = weights.get(name);
      if (wt != 1.0 || wf != 1.0)
        std::cerr << "warning: weight for defined atom " << name
                  << " is ignored (defined atoms are neutral)\n";
    }
  }
  std::vector<std::string> param_names;
  for (wfc::AtomId a : alphabet.params()) param_names.push_back(alphabet.name(a));
  const auto filled = weights.complete_for(param_names, allow_missing || path.empty());
  if (!filled.empty() && !path.empty()) {
    std::cerr << "warning: defaulting weights (1,1) for:";
    for (const auto& name : filled) std::cerr << " " << name;
    std::cerr << "\n";
  }
  return weights;
}

int cmd_compile(const CommonOptions& common, const std::string& format, const std::string& bound,
                std::optional<std::size_t> budget, bool canonicalize,
                const std::string& stats_path) {
  const auto start = std::chrono::steady_clock::now();
  wfc::GroundProgram program = load_ground(common.program_path, common.domain);
  wfc::CompileOptions options = compile_options(common);
  options.budget = budget;
  options.canonicalize = canonicalize;
  wfc::Trace trace = wfc::compile(program, options);
  const bool exact = trace.is_exact();
  const wfc::Alphabet& alphabet = program.alphabet();
  const auto& final_state = trace.final_state();

  if (format == "cnf" && !exact && bound.empty())
    throw wfc::Error(
        "cnf output needs an exact compiled model or an explicit --bound lower|upper",
        wfc::ExitCode::non_exact);

  std::string artifact;
  if (format == "text") {
    std::ostringstream os;
    os << "status: " << (exact ? "exact" : "non-exact") << "\n";
    if (trace.partial) os << "note: trace truncated by --budget\n";
    const auto& defined = alphabet.defined();
    for (std::size_t i = 0; i < defined.size(); ++i) {
      const auto lo = final_state.lower.at(i);
      const auto up = final_state.upper.at(i);
      if (exact)
        os << alphabet.name(defined[i]) << " = " << render_formula(*trace.store, lo) << "\n";
      else
        os << alphabet.name(defined[i]) << ": t = " << render_formula(*trace.store, lo)
           << ", p = " << render_formula(*trace.store, up) << "\n";
    }
    artifact = os.str();
  } else if (format == "json") {
    ordered_json j;
    j["exact"] = exact;
    j["backend"] = common.backend;
    j["partial"] = trace.partial;
    ordered_json atoms;
    const auto& defined = alphabet.defined();
    for (std::size_t i = 0; i < defined.size(); ++i) {
      if (exact) {
        atoms[alphabet.name(defined[i])] = render_formula(*trace.store, final_state.lower.at(i));
      } else {
        atoms[alphabet.name(defined[i])] = {
            {"lower", render_formula(*trace.store, final_state.lower.at(i))},
            {"upper", render_formula(*trace.store, final_state.upper.at(i))}};
      }
    }
    j["atoms"] = std::move(atoms);
    j["trace"] = wfc::trace_to_json(trace);
    j["program"] = program.to_json();
    artifact = j.dump(2) + "\n";
  } else if (format == "dot") {
    std::ostringstream os;
    wfc::write_trace_dot(os, trace);
    artifact = os.str();
  } else if (format == "cnf") {
    wfc::FormulaRef theory;
    if (bound == "lower")
      theory = wfc::theory_of(final_state.lower, *trace.store);
    else if (bound == "upper")
      theory = wfc::theory_of(final_state.upper, *trace.store);
    else
      theory = wfc::theory_of(final_state.lower, *trace.store);
    artifact = dimacs(trace.store->to_cnf(theory), alphabet);
  } else {
    throw wfc::Error("unknown format: " + format);
  }
  write_output(common.output_path, artifact);

  const auto wall =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  ordered_json stats;
  stats["exact"] = exact;
  stats["refinements"] = {{"application", trace.application_count},
                          {"unfoundedness", trace.unfoundedness_count}};
  stats["steps"] = trace.steps.size();
  stats["store_nodes"] = trace.store->node_count();
  ordered_json sizes = ordered_json::array();
  for (const auto& step : trace.steps) sizes.push_back(step.store_nodes);
  stats["store_nodes_per_step"] = std::move(sizes);
  stats["wall_ms"] = wall.count();
  if (stats_path.empty()) {
    std::cerr << stats.dump() << "\n";
  } else {
    std::ofstream out(stats_path, std::ios::binary);
    out << stats.dump(2) << "\n";
  }

  if (!exact) {
    std::cerr << "non-exact model; three-valued atoms:";
    for (const auto& name : trace.three_valued_atoms()) std::cerr << " " << name;
    std::cerr << "\n";
    return static_cast<int>(wfc::ExitCode::non_exact);
  }
  return 0;
}

int cmd_oracle(const CommonOptions& common, std::uint64_t threshold, std::uint64_t samples,
               std::uint64_t seed, unsigned threads) {
  wfc::GroundProgram program = load_ground(common.program_path, common.domain);
  wfc::Trace trace = wfc::compile(program, compile_options(common));
  wfc::OracleOptions options;
  options.exhaustive_threshold = threshold;
  options.samples = samples;
  options.seed = seed;
  options.threads = threads;
  const wfc::OracleReport report = wfc::validate_against_oracle(trace, options);
  const std::size_t params = trace.program.alphabet().params().size();
  if (report.pass) {
    std::cout << "oracle: PASS checked=" << report.checked;
    if (report.exhaustive)
      std::cout << " (exhaustive)";
    else
      std::cout << " of 2^" << params << " (sampled, seed=" << seed << ")";
    std::cout << "\n";
    return 0;
  }
  std::cout << "oracle: FAIL at parameter interpretation {";
  for (std::size_t i = 0; i < report.witness_params->size(); ++i)
    std::cout << (i ? ", " : "") << (*report.witness_params)[i];
  std::cout << "}\n";
  return static_cast<int>(wfc::ExitCode::validation_failed);
}

ordered_json model_to_json(const wfc::Interpretation& model, const wfc::Alphabet& alphabet) {
  ordered_json names = ordered_json::array();
  for (wfc::AtomId a = 0; a < alphabet.size(); ++a)
    if (model.test(a)) names.push_back(alphabet.name(a));
  return names;
}

std::string rational_string(const wfc::Rational& q) {
  std::ostringstream os;
  os << q.numerator() << "/" << q.denominator();
  return os.str();
}

int cmd_query(const std::string& mode, const CommonOptions& common,
              const std::string& second_path, const std::string& evidence_text,
              const std::string& weights_path, std::size_t limit,
              std::optional<std::size_t> budget, bool rational, bool allow_missing) {
  ordered_json result;
  result["mode"] = mode;
  int exit_code = 0;

  if (mode == "equiv") {
    if (second_path.empty()) throw wfc::Error("equiv needs two program paths");
    wfc::GroundProgram first = load_ground(common.program_path, common.domain);
    wfc::GroundProgram second = load_ground(second_path, common.domain);
    const auto eq = wfc::check_equivalence(first, second);
    result["value"] = eq.equivalent;
    if (!eq.equivalent) {
      result["differing_atom"] = eq.differing_atom;
      result["witness"] = eq.witness;
      result["witness_model_of"] = eq.witness_model_of;
    }
  } else {
    wfc::GroundProgram program = load_ground(common.program_path, common.domain);
    wfc::CompileOptions options = compile_options(common);
    options.budget = budget;
    wfc::Trace trace = wfc::compile(program, options);
    std::optional<wfc::Expr> evidence;
    if (!evidence_text.empty())
      evidence = wfc::parse_evidence(evidence_text, program.alphabet());
    const wfc::Expr* evidence_ptr = evidence ? &*evidence : nullptr;

    if (mode == "count") {
      result["value"] = wfc::count_models(trace, evidence_ptr);
    } else if (mode == "wmc") {
      wfc::WeightFunction weights = load_weights(weights_path, trace, allow_missing);
      if (rational) {
        const wfc::Rational q = wfc::wmc_exact(trace, evidence_ptr, weights);
        result["value"] = wfc::rational_to_double(q);
        result["rational"] = rational_string(q);
      } else {
        result["value"] = wfc::wmc(trace, evidence_ptr, weights);
      }
    } else if (mode == "models") {
      const auto models = wfc::enumerate_models(trace, evidence_ptr, limit);
      result["count"] = models.size();
      ordered_json list = ordered_json::array();
      for (const auto& m : models) list.push_back(model_to_json(m, program.alphabet()));
      result["models"] = std::move(list);
    } else if (mode == "bounds") {
      wfc::WeightFunction weights = load_weights(weights_path, trace, allow_missing);
      const auto steps = wfc::wmc_bounds(trace, evidence_ptr, weights,
                                         rational ? wfc::WmcMode::exact : wfc::WmcMode::floating);
      ordered_json list = ordered_json::array();
      for (const auto& s : steps) {
        ordered_json step;
        step["i"] = s.index;
        step["kind"] = s.kind;
        step["lo"] = s.lower;
        step["hi"] = s.upper;
        if (s.lower_exact) {
          step["lo_exact"] = rational_string(*s.lower_exact);
          step["hi_exact"] = rational_string(*s.upper_exact);
        }
        list.push_back(std::move(step));
      }
      result["steps"] = std::move(list);
      result["partial"] = trace.partial;
    } else {
      throw wfc::Error("unknown query mode: " + mode);
    }
  }

  write_output(common.output_path, result.dump(2) + "\n");
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge compiler for parametrised logic programs under the well-founded "
               "semantics"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string format = "text", bound, stats_path;
  std::optional<std::size_t> budget;
  bool canonicalize = false;

  auto add_common = [&](CLI::App* cmd, bool with_backend = true) {
    cmd->add_option("program", common.program_path, "program file")->required();
    cmd->add_option("--domain", common.domain, "extra grounding constants")->delimiter(',');
    if (with_backend) {
      cmd->add_option("--backend", common.backend, "target representation")
          ->check(CLI::IsMember({"circuit", "bdd"}));
      cmd->add_option("--var-order", common.var_order, "diagram variable order")
          ->check(CLI::IsMember({"mention", "lex"}));
    }
    cmd->add_option("-o,--output", common.output_path, "output file (default stdout)");
  };

  CLI::App* compile = app.add_subcommand("compile", "compile a program");
  add_common(compile);
  compile->add_option("--format", format, "artifact format")
      ->check(CLI::IsMember({"text", "json", "dot", "cnf"}));
  compile->add_option("--bound", bound, "which theory to export when non-exact")
      ->check(CLI::IsMember({"lower", "upper"}));
  compile->add_option("--budget", budget, "stop after this many refinement steps");
  compile->add_flag("--canonicalize", canonicalize, "rebuild final formulas from their diagrams");
  compile->add_option("--stats", stats_path, "write the stats block to a file instead of stderr");

  std::uint64_t threshold = std::uint64_t{1} << 20, samples = 4096, seed = 0;
  unsigned threads = 0;
  CLI::App* oracle = app.add_subcommand("oracle", "validate the compilation against the "
                                                  "concrete fixpoint semantics");
  add_common(oracle);
  oracle->add_option("--threshold", threshold, "max parameter space for exhaustive sweeps");
  oracle->add_option("--samples", samples, "sample count above the threshold");
  oracle->add_option("--seed", seed, "sampling seed");
  oracle->add_option("--threads", threads, "worker threads (0 = hardware)");

  std::string query_mode, second_path, evidence_text, weights_path;
  std::size_t limit = 64;
  bool rational = false, allow_missing = false;
  CLI::App* query = app.add_subcommand("query", "query a compiled program");
  query->add_option("mode", query_mode, "count|wmc|models|equiv|bounds")
      ->required()
      ->check(CLI::IsMember({"count", "wmc", "models", "equiv", "bounds"}));
  add_common(query);
  query->add_option("program2", second_path, "second program (equiv)");
  query->add_option("--evidence", evidence_text, "evidence formula (& | ! and parentheses)");
  query->add_option("--weights", weights_path, "weight file: `atom w_true w_false`");
  query->add_option("--limit", limit, "max models to enumerate");
  query->add_option("--budget", budget, "stop compilation after this many refinement steps");
  query->add_flag("--rational", rational, "exact rational weighted counting");
  query->add_flag("--allow-missing-weights", allow_missing,
                  "default missing weight entries to (1,1) with a warning");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (compile->parsed())
      return cmd_compile(common, format, bound, budget, canonicalize, stats_path);
    if (oracle->parsed()) return cmd_oracle(common, threshold, samples, seed, threads);
    if (query->parsed())
      return cmd_query(query_mode, common, second_path, evidence_text, weights_path, limit,
                       budget, rational, allow_missing);
  } catch (const wfc::NonExactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "hint: `query bounds` reports anytime lower/upper weighted counts for "
                 "three-valued models\n";
    return static_cast<int>(e.code());
  } catch (const wfc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
