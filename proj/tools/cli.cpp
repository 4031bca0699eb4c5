#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "mvl/abstraction.hpp"
#include "mvl/equivalence.hpp"
#include "mvl/netlist.hpp"
#include "mvl/normal_forms.hpp"
#include "mvl/sequential.hpp"
#include "mvl/simulator.hpp"

namespace mvlsim {

using nlohmann::ordered_json;
using namespace mvl;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::optional<std::int64_t> inf_ceiling;
  std::string json_path;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  if (const char* env = std::getenv("MVLSIM_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw Error(Errc::invalid_argument, fmt::format("MVLSIM_SEED='{}' is not a number", s));
    }
    return v;
  }
  return 0;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io, fmt::format("cannot write '{}'", path));
  f << content;
  if (!content.empty() && content.back() != '\n') f << '\n';
  if (!f) throw Error(Errc::io, fmt::format("write to '{}' failed", path));
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Puts the run configuration right after the schema version.
std::string with_config(const std::string& body, const ordered_json& config) {
  const ordered_json parsed = ordered_json::parse(body);
  ordered_json j;
  j["schema_version"] = 1;
  j["config"] = config;
  for (const auto& [k, v] : parsed.items()) {
    if (k != "schema_version") j[k] = v;
  }
  return j.dump(2);
}

void emit_json(std::ostream& out, const Common& c, const std::string& text, bool to_stdout) {
  if (!c.json_path.empty()) write_file(c.json_path, text);
  if (to_stdout) out << text << '\n';
}

ValueSyntax syntax_of(const Common& c) { return ValueSyntax{c.inf_ceiling}; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<TernaryValue> parse_ternary_inputs(const Circuit& c, const std::string& text) {
  if (text.find('=') == std::string::npos) {
    auto v = parse_ternary_vector(text);
    if (v.size() != c.input_count()) {
      throw Error(Errc::incomplete_valuation,
                  fmt::format("{} ternary values for {} inputs", v.size(), c.input_count()));
    }
    return v;
  }
  std::vector<std::optional<TernaryValue>> slots(c.input_count());
  for (const std::string& item : split_list(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq + 2 != item.size()) {
      throw Error(Errc::syntax, fmt::format("expected name=T|F|X, got '{}'", item));
    }
    const auto idx = c.input_index(item.substr(0, eq));
    if (!idx) throw Error(Errc::undeclared_identifier, fmt::format("'{}' is not an input", item.substr(0, eq)));
    if (slots[*idx]) throw Error(Errc::duplicate_definition, fmt::format("'{}' assigned twice", item.substr(0, eq)));
    slots[*idx] = parse_ternary(item[eq + 1]);
  }
  std::vector<TernaryValue> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) throw Error(Errc::incomplete_valuation, fmt::format("input '{}' unassigned", c.inputs()[i]));
    out.push_back(*slots[i]);
  }
  return out;
}

ordered_json base_config(std::string_view sub, const std::vector<std::string>& netlists) {
  ordered_json j;
  j["subcommand"] = sub;
  j["netlists"] = netlists;
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiple-valued logic simulation and verification", "mvlsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mvlsim 1.0");

  Common common;
  const auto add_common = [&](CLI::App* sub, bool seeded, bool threaded) {
    sub->add_option("--json", common.json_path, "Also write the JSON artifact to this file");
    sub->add_option("--inf-ceiling", common.inf_ceiling,
                    "Read literals of at least this magnitude as +/-inf")
        ->check(CLI::PositiveNumber);
    if (seeded) sub->add_option("--seed", common.seed, "Random seed (default: $MVLSIM_SEED or 0)");
    if (threaded) sub->add_option("-j,--workers", common.workers, "Worker threads (0: all cores)");
  };

  std::string netlist;
  std::string output_name;
  const auto add_netlist = [&](CLI::App* sub, bool with_output) {
    sub->add_option("-n,--netlist", netlist, "Netlist file")->required();
    if (with_output) sub->add_option("-o,--output", output_name, "Output signal");
  };

  // sim
  auto* sim = app.add_subcommand("sim", "Evaluate over M and print the outputs");
  add_netlist(sim, false);
  std::string valuation_text, dot_path;
  sim->add_option("-v,--values", valuation_text, "Input values, e.g. a=2,b=-1,c=inf")->required();
  sim->add_option("--dot", dot_path, "Write the trace as Graphviz DOT");
  add_common(sim, false, false);

  // ternary-sim
  auto* tsim = app.add_subcommand("ternary-sim", "Evaluate over strong Kleene logic");
  add_netlist(tsim, false);
  std::string ternary_text;
  tsim->add_option("-v,--values", ternary_text, "T/F/X per input, e.g. T,X,F or a=T,b=X")->required();
  add_common(tsim, false, false);

  // abstract
  auto* abst = app.add_subcommand("abstract", "Maximal abstract valuation for a signed permutation");
  add_netlist(abst, true);
  std::string w_text, mode_text = "strict";
  bool probe = false;
  abst->add_option("-w,--stimulus", w_text, "Signed permutation, e.g. 3,-1,2 (random when absent)");
  abst->add_option("--mode", mode_text, "faithful or strict")->check(CLI::IsMember({"faithful", "strict"}));
  abst->add_flag("--probe", probe, "Also flip the sign of the deciding input");
  add_common(abst, true, false);

  // check-maximal
  auto* chk = app.add_subcommand("check-maximal", "Check a ternary vector for maximality");
  add_netlist(chk, true);
  std::string av_text;
  chk->add_option("-a,--valuation", av_text, "Ternary vector, e.g. T,X,T")->required();
  add_common(chk, false, false);

  // equiv / oracle-equiv
  std::string netlist_a, netlist_b;
  auto* eq = app.add_subcommand("equiv", "Search for a binary counterexample guided by M");
  eq->add_option("a", netlist_a, "First netlist")->required();
  eq->add_option("b", netlist_b, "Second netlist")->required();
  SearchOptions sopt;
  eq->add_option("--budget", sopt.budget, "Trials")->check(CLI::PositiveNumber);
  eq->add_option("--expansion-cap", sopt.expansion_cap, "Flips tried per discrepancy side");
  eq->add_flag("--log", sopt.keep_log, "Record every discrepancy");
  eq->add_flag("--stop-on-m", sopt.stop_on_m_discrepancy, "Stop at the first M discrepancy");
  add_common(eq, true, true);

  auto* oeq = app.add_subcommand("oracle-equiv", "Exhaustive binary equivalence check");
  oeq->add_option("a", netlist_a, "First netlist")->required();
  oeq->add_option("b", netlist_b, "Second netlist")->required();
  add_common(oeq, false, false);

  // dnf
  auto* dnf = app.add_subcommand("dnf", "Normal form of one output");
  add_netlist(dnf, true);
  std::string form = "dmcf";
  bool negate = false;
  dnf->add_option("--form", form, "dmcf, bcf, fdnf or mincover")
      ->check(CLI::IsMember({"dmcf", "bcf", "fdnf", "mincover"}));
  dnf->add_flag("--negate", negate, "Use the negated output");
  add_common(dnf, false, false);

  // complexity
  auto* cx = app.add_subcommand("complexity", "Functional and structural complexity");
  add_netlist(cx, true);
  add_common(cx, false, false);

  // gen-vectors
  auto* gv = app.add_subcommand("gen-vectors", "Ternary and M test vectors");
  add_netlist(gv, true);
  std::string controls;
  gv->add_option("--control", controls, "Inputs driven at +/-inf, comma separated");
  add_common(gv, false, false);

  // seq-run / seq-init
  std::size_t cycles = 8;
  std::string stimulus_path;
  int digits = 3;
  const auto add_seq = [&](CLI::App* sub) {
    add_netlist(sub, false);
    sub->add_option("--cycles", cycles, "Cycles to simulate")->check(CLI::PositiveNumber);
    sub->add_option("--stimulus", stimulus_path, "CSV stimulus (random signed permutations when absent)");
    sub->add_option("--digits", digits, "Truth digits of the display form")->check(CLI::Range(1, 18));
    sub->add_option("--control", controls, "Inputs driven at +/-inf, comma separated");
    add_common(sub, true, false);
  };
  auto* srun = app.add_subcommand("seq-run", "Cycle simulation with temporal values");
  add_seq(srun);
  auto* sinit = app.add_subcommand("seq-init", "Initialization length, with the ternary oracle");
  add_seq(sinit);

  // mutate
  auto* mut = app.add_subcommand("mutate", "Inject a redundant term or a conjunctive bug");
  add_netlist(mut, true);
  std::string kind_text = "redundant_contradiction", term_text, var_text, out_path;
  mut->add_option("--kind", kind_text, "redundant_contradiction, redundant_tautology or conjunctive_bug");
  mut->add_option("--term", term_text, "Literals of the bug term, e.g. 'x1 ~x2'");
  mut->add_option("--var", var_text, "Variable of the redundant term");
  mut->add_option("-O,--out", out_path, "Write the netlist here instead of stdout");
  add_common(mut, true, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const ValueSyntax syntax = syntax_of(common);

    if (sim->parsed()) {
      const Circuit c = load_circuit(netlist);
      const Trace t = evaluate(c, Valuation::parse(c, valuation_text, syntax));
      for (const auto& [name, v] : t.outputs) out << name << " = " << format_value(v) << '\n';
      if (!dot_path.empty()) write_file(dot_path, trace_to_dot(t, c));
      if (!common.json_path.empty()) {
        ordered_json cfg = base_config("sim", {netlist});
        cfg["values"] = valuation_text;
        emit_json(out, common, with_config(trace_to_json(t, c), cfg), false);
      }
      return kExitOk;
    }

    if (tsim->parsed()) {
      const Circuit c = load_circuit(netlist);
      const auto in = parse_ternary_inputs(c, ternary_text);
      const auto res = evaluate_ternary(c, in);
      ordered_json j;
      j["schema_version"] = 1;
      ordered_json outs = ordered_json::object();
      for (std::size_t k = 0; k < res.size(); ++k) {
        out << c.outputs()[k].name << " = " << to_char(res[k]) << '\n';
        outs[c.outputs()[k].name] = std::string(1, to_char(res[k]));
      }
      j["outputs"] = outs;
      ordered_json cfg = base_config("ternary-sim", {netlist});
      cfg["values"] = ternary_text;
      emit_json(out, common, with_config(j.dump(), cfg), false);
      return kExitOk;
    }

    if (abst->parsed()) {
      const Circuit c = load_circuit(netlist);
      const std::uint64_t seed = resolve_seed(common.seed);
      const SignedPermutation w = w_text.empty()
                                      ? random_signed_permutation(c.input_count(), seed)
                                      : SignedPermutation::parse(w_text);
      AbstractionOptions opt;
      opt.mode = mode_text == "faithful" ? AbstractionMode::Faithful : AbstractionMode::Strict;
      opt.sign_flip_probe = probe;
      const auto r = maximal_abstract_valuation(c, output_name, w, opt);
      ordered_json cfg = base_config("abstract", {netlist});
      cfg["output"] = resolve_output(c, output_name);
      cfg["stimulus"] = w.to_string();
      cfg["seed"] = w_text.empty() ? ordered_json(seed) : ordered_json(nullptr);
      cfg["mode"] = mode_text;
      cfg["probe"] = probe;
      emit_json(out, common, with_config(abstraction_to_json(r, c, output_name, opt.mode), cfg), true);
      return kExitOk;
    }

    if (chk->parsed()) {
      const Circuit c = load_circuit(netlist);
      const auto av = parse_ternary_vector(av_text);
      const auto v = check_maximal(c, output_name, av);
      ordered_json j;
      j["schema_version"] = 1;
      j["status"] = to_string(v.status);
      j["output_value"] = std::string(1, to_char(v.output));
      j["witness"] = v.witness ? ordered_json(c.inputs()[*v.witness]) : ordered_json(nullptr);
      ordered_json cfg = base_config("check-maximal", {netlist});
      cfg["output"] = resolve_output(c, output_name);
      cfg["valuation"] = format_ternary(av);
      emit_json(out, common, with_config(j.dump(), cfg), true);
      return v.status == Maximality::Maximal ? kExitOk : kExitFinding;
    }

    if (eq->parsed()) {
      const Circuit a = load_circuit(netlist_a);
      const Circuit b = load_circuit(netlist_b);
      sopt.seed = resolve_seed(common.seed);
      sopt.workers = common.workers;
      const auto v = nonequivalence_search(a, b, sopt);
      ordered_json cfg = base_config("equiv", {netlist_a, netlist_b});
      cfg["seed"] = sopt.seed;
      cfg["budget"] = sopt.budget;
      cfg["expansion_cap"] = sopt.expansion_cap;
      cfg["stop_on_m"] = sopt.stop_on_m_discrepancy;
      cfg["log"] = sopt.keep_log;
      emit_json(out, common, with_config(verdict_to_json(v, a, sopt), cfg), true);
      return v.outcome == SearchOutcome::Counterexample ? kExitFinding : kExitOk;
    }

    if (oeq->parsed()) {
      const Circuit a = load_circuit(netlist_a);
      const Circuit b = load_circuit(netlist_b);
      const auto v = binary_equivalence_oracle(a, b);
      emit_json(out, common, with_config(oracle_to_json(v, a), base_config("oracle-equiv", {netlist_a, netlist_b})),
                true);
      return v.equivalent ? kExitOk : kExitFinding;
    }

    if (dnf->parsed()) {
      const Circuit c = load_circuit(netlist);
      const std::string name = resolve_output(c, output_name);
      Dnf d;
      std::vector<Term> contradictions;
      bool optimal = true;
      if (form == "dmcf") d = to_dmcf(c, name, negate);
      else if (form == "bcf") d = blake_bcf(c, name, negate);
      else if (form == "fdnf") d = fdnf(c, name, negate);
      else {
        auto cov = minimal_cover(to_dmcf(c, name, negate));
        d = std::move(cov.cover);
        contradictions = std::move(cov.contradictions);
        optimal = cov.optimal;
      }
      out << format_dnf(d) << '\n';
      if (!contradictions.empty()) {
        out << "contradictions: " << format_terms(contradictions, d.variables) << '\n';
      }
      if (!optimal) out << "note: cover is greedy, not proven minimal\n";
      if (!common.json_path.empty()) {
        ordered_json j;
        j["schema_version"] = 1;
        j["form"] = form;
        j["terms"] = ordered_json::array();
        for (const Term& t : d.terms) j["terms"].push_back(format_term(t, d.variables));
        j["implicants"] = d.implicants().size();
        j["contradictions"] = ordered_json::array();
        for (const Term& t : contradictions) j["contradictions"].push_back(format_term(t, d.variables));
        for (const Term& t : d.contradictions()) j["contradictions"].push_back(format_term(t, d.variables));
        j["optimal"] = optimal;
        ordered_json cfg = base_config("dnf", {netlist});
        cfg["output"] = name;
        cfg["form"] = form;
        cfg["negate"] = negate;
        emit_json(out, common, with_config(j.dump(), cfg), false);
      }
      return kExitOk;
    }

    if (cx->parsed()) {
      const Circuit c = load_circuit(netlist);
      const std::string name = resolve_output(c, output_name);
      const auto r = complexity_report(c, name);
      ordered_json cfg = base_config("complexity", {netlist});
      cfg["output"] = name;
      emit_json(out, common, with_config(complexity_to_json(r), cfg), true);
      return kExitOk;
    }

    if (gv->parsed()) {
      const Circuit c = load_circuit(netlist);
      const std::string name = resolve_output(c, output_name);
      TestVectorOptions opt;
      opt.control_inputs = split_list(controls);
      const auto vectors = generate_test_vectors(c, name, opt);
      ordered_json arr = ordered_json::array();
      for (const auto& tv : vectors) {
        std::string m;
        for (std::size_t i = 0; i < tv.m_form.size(); ++i) {
          if (i) m += ',';
          m += format_value(tv.m_form[i]);
        }
        out << format_ternary(tv.ternary) << " -> " << to_char(tv.expected) << "   m: " << m << '\n';
        ordered_json e;
        e["ternary"] = format_ternary(tv.ternary);
        e["expected"] = std::string(1, to_char(tv.expected));
        e["m"] = m;
        arr.push_back(std::move(e));
      }
      ordered_json j;
      j["schema_version"] = 1;
      j["vectors"] = std::move(arr);
      ordered_json cfg = base_config("gen-vectors", {netlist});
      cfg["output"] = name;
      cfg["control"] = opt.control_inputs;
      emit_json(out, common, with_config(j.dump(), cfg), false);
      return kExitOk;
    }

    if (srun->parsed() || sinit->parsed()) {
      const Circuit c = load_circuit(netlist);
      StimulusPlan plan;
      plan.seed = resolve_seed(common.seed);
      plan.truth_digits = digits;
      plan.control_inputs = split_list(controls);
      if (!stimulus_path.empty()) {
        plan.source = StimulusPlan::Source::Rows;
        try {
          plan.rows = parse_stimulus_csv(c, read_file(stimulus_path), syntax);
        } catch (const Error& e) {
          throw Error(e.code(), fmt::format("{}:{}", stimulus_path, e.what()));
        }
      }
      const RunResult r = run(c, plan, cycles);
      const auto init = detect_initialization(r);
      ordered_json cfg = base_config(srun->parsed() ? "seq-run" : "seq-init", {netlist});
      cfg["cycles"] = cycles;
      cfg["stimulus"] = stimulus_path.empty() ? ordered_json(nullptr) : ordered_json(stimulus_path);
      cfg["seed"] = plan.seed;
      cfg["digits"] = digits;
      cfg["control"] = plan.control_inputs;
      if (srun->parsed()) {
        emit_json(out, common, with_config(run_to_json(r, c, init), cfg), true);
        return kExitOk;
      }
      std::vector<std::vector<BinaryValue>> bin;
      for (const auto& row : r.inputs) {
        std::vector<BinaryValue> b;
        for (const auto& v : row) b.push_back(v.negative() ? BinaryValue::F : BinaryValue::T);
        bin.push_back(std::move(b));
      }
      const auto oracle = ternary_init_oracle(c, bin);
      ordered_json j;
      j["schema_version"] = 1;
      j["length"] = init.length ? ordered_json(*init.length) : ordered_json(nullptr);
      j["ternary_oracle"] = oracle ? ordered_json(*oracle) : ordered_json(nullptr);
      j["agree"] = init.length == oracle;
      j["min_epoch"] = init.min_epoch;
      j["shifted_length"] = init.shifted_length;
      emit_json(out, common, with_config(j.dump(), cfg), true);
      return kExitOk;
    }

    if (mut->parsed()) {
      const Circuit c = load_circuit(netlist);
      MutationSpec spec;
      spec.kind = parse_mutation_kind(kind_text);
      spec.term = term_text;
      spec.variable = var_text;
      spec.output = output_name;
      if (spec.kind == MutationKind::ConjunctiveBug && term_text.empty()) {
        throw Error(Errc::invalid_argument, "conjunctive_bug needs --term");
      }
      const std::string text = print_circuit(inject_mutation(c, spec, resolve_seed(common.seed)));
      if (out_path.empty()) out << text;
      else write_file(out_path, text);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "mvlsim: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mvlsim: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mvlsim
