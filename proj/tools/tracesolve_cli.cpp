// tracesolve: command line front end.
//
// Exit codes: 0 success (SAT, MATCH), 1 negative answer (UNSAT, MISMATCH,
// rejected solution), 2 error (bad input, engine failure).

#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tracesolve/oracle.hpp"
#include "tracesolve/pipeline.hpp"
#include "tracesolve/trace.hpp"

namespace {

using namespace ts;

void print_tuples(const Instance& inst, const std::set<Tuple>& s) {
  for (const Tuple& t : s) std::cout << format_tuple(inst, t) << "\n";
  std::cout << "COUNT " << s.size() << "\n";
}

void report_errors(const BuildResult& b) {
  for (const std::string& e : b.errors) std::cerr << "warning: " << e << "\n";
}

std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

Tuple read_solution(const Instance& inst, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw Error(path + ": " + e.what());
  }
  Tuple t(static_cast<std::size_t>(inst.k()));
  if (j.is_array()) {
    if (j.size() != t.size()) throw Error(path + ": expected " + std::to_string(t.size()) + " words");
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = parse_word(inst, j[i]);
  } else if (j.is_object()) {
    for (int i = 0; i < inst.k(); ++i) {
      const std::string& n = inst.variables[static_cast<std::size_t>(i)].name;
      if (!j.contains(n)) throw Error(path + ": missing variable '" + n + "'");
      t[static_cast<std::size_t>(i)] = parse_word(inst, j.at(n));
    }
  } else {
    throw Error(path + ": expected an array of words or an object keyed by variable");
  }
  for (Word& w : t) w = normal_form(w, inst.alphabet.table());
  return t;
}

int run_certify(const Instance& inst, const std::string& sol_path, const SolveOptions& opt) {
  const Tuple t = read_solution(inst, sol_path);
  std::cout << "solution " << format_tuple(inst, t) << "\n";
  if (!oracle_accepts(inst, t)) {
    std::cout << "REJECTED not a solution\n";
    return 1;
  }
  Encoding enc = encode(inst, {t}, opt.budgets);
  const Seed& seed = enc.seeds.at(0);
  const Task& task = enc.tasks[static_cast<std::size_t>(seed.task)];
  EngineStats stats;
  ForwardPath path = forward_path(task.initial, seed.sol, &stats);
  const State* prev = &path.start;
  std::cout << "q0 " << prev->show(prev->W) << "\n";
  std::size_t i = 0;
  for (const PathStep& st : path.steps) {
    ++i;
    std::cout << "  [" << st.phase << "] " << label_summary(*prev, st.to, st.label) << "\n";
    std::cout << "q" << i << " " << st.to.show(st.to.W) << "\n";
    prev = &st.to;
  }
  for (const std::string& a : path.annotations) std::cout << "note: " << a << "\n";
  std::vector<const TransitionLabel*> labels;
  for (const PathStep& st : path.steps) labels.push_back(&st.label);
  Tuple composed;
  for (const Word& w : apply_to_distinguished(labels, task.problem->distinguished))
    composed.push_back(project_pi0(w, task.problem->alphabet));
  composed = enc.decode(composed);
  const bool ok = composed == t;
  std::cout << "composed " << format_tuple(inst, composed) << "\n";
  std::cout << (ok ? "CERTIFIED" : "MISMATCH") << " " << plural(path.steps.size(), "transition") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracesolve: equations with rational constraints over trace monoids and graph groups"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (0: all cores)")->capture_default_str();

  std::string file, out_path, format = "dot", sol_path;
  int bound = 4;
  std::size_t max_paths = 0;

  auto add_file = [&](CLI::App* c) { c->add_option("file", file, "instance file")->required(); };
  auto add_bound = [&](CLI::App* c, bool required) {
    auto* o = c->add_option("--bound,-L", bound, "length bound for the oracle and the enumeration");
    if (required) o->required();
    else o->capture_default_str();
  };

  CLI::App* sat = app.add_subcommand("sat", "decide satisfiability (relative to the bound)");
  add_file(sat);
  add_bound(sat, false);
  CLI::App* finite = app.add_subcommand("finite", "decide whether the solution set is finite");
  add_file(finite);
  add_bound(finite, true);
  CLI::App* sols = app.add_subcommand("solutions", "enumerate solutions from the automaton");
  add_file(sols);
  add_bound(sols, true);
  sols->add_option("--max-paths", max_paths, "also list up to P accepting paths");
  CLI::App* nfa = app.add_subcommand("nfa", "export the automaton");
  add_file(nfa);
  add_bound(nfa, false);
  nfa->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  nfa->add_option("--out", out_path, "output file (default: stdout)");
  CLI::App* cert = app.add_subcommand("certify", "replay the guided construction for one solution");
  add_file(cert);
  cert->add_option("--solution", sol_path, "JSON file: array of words or object keyed by variable")->required();
  CLI::App* orc = app.add_subcommand("oracle", "brute-force solutions");
  add_file(orc);
  add_bound(orc, true);
  CLI::App* chk = app.add_subcommand("check", "compare the automaton with the oracle");
  add_file(chk);
  add_bound(chk, true);

  CLI11_PARSE(app, argc, argv);

  try {
    const Instance inst = load_instance(file);
    SolveOptions opt;
    opt.bound = bound;
    opt.jobs = jobs;
    OracleOptions oo;
    oo.jobs = jobs;

    if (sat->parsed()) {
      BuildResult b = build_nfa(inst, opt);
      report_errors(b);
      const bool s = b.nfa.satisfiable();
      std::cout << "VERDICT " << (s ? "sat" : "unsat") << "\n";
      return s ? 0 : 1;
    }
    if (finite->parsed()) {
      BuildResult b = build_nfa(inst, opt);
      report_errors(b);
      FiniteVerdict v = finiteness(inst, b, bound, opt);
      std::cout << v.line() << "\n";
      if (v.cycle) {
        std::cout << "cycle:";
        for (int s : *v.cycle) std::cout << " q" << s;
        std::cout << " q" << v.cycle->front() << "\n";
      }
      std::cout << "VERDICT finite=" << v.verdict(bound) << "\n";
      return 0;
    }
    if (sols->parsed()) {
      BuildResult b = build_nfa(inst, opt);
      report_errors(b);
      print_tuples(inst, nfa_solutions(b, bound));
      if (max_paths > 0) {
        std::size_t i = 0;
        for (const AcceptingPath& p : enumerate_paths(b.nfa, max_paths)) {
          std::cout << "PATH " << i++ << " length " << p.edges.size() << " -> "
                    << format_tuple(inst, b.enc.decode(p.tuple)) << "\n";
        }
      }
      return 0;
    }
    if (nfa->parsed()) {
      BuildResult b = build_nfa(inst, opt);
      report_errors(b);
      const std::string text = format == "json" ? b.nfa.to_json().dump(2) + "\n" : b.nfa.to_dot();
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path);
        if (!out) throw Error(out_path + ": cannot write");
        out << text;
        std::cout << "wrote " << out_path << " (" << plural(b.nfa.states.size(), "state") << ", "
                  << plural(b.nfa.edges.size(), "edge") << ")\n";
      }
      return 0;
    }
    if (cert->parsed()) return run_certify(inst, sol_path, opt);
    if (orc->parsed()) {
      print_tuples(inst, enumerate_bruteforce(inst, bound, oo));
      return 0;
    }
    if (chk->parsed()) {
      BuildResult b = build_nfa(inst, opt);
      report_errors(b);
      const std::set<Tuple> got = nfa_solutions(b, bound);
      const std::set<Tuple>& want = b.oracle;
      if (got == want) {
        std::cout << "MATCH " << plural(want.size(), "tuple") << "\n";
        return 0;
      }
      for (const Tuple& t : want)
        if (!got.count(t)) std::cout << "missing " << format_tuple(inst, t) << "\n";
      for (const Tuple& t : got)
        if (!want.count(t)) std::cout << "extra " << format_tuple(inst, t) << "\n";
      std::cout << "MISMATCH automaton " << got.size() << " vs oracle " << want.size() << "\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
