// Acceptance run over the instance corpus: one PASS/FAIL line per
// criterion, exit code 1 if any fails.

#include <algorithm>
#include <chrono>
#include <deque>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tracesolve/monoid.hpp"
#include "tracesolve/oracle.hpp"
#include "tracesolve/pipeline.hpp"
#include "tracesolve/trace.hpp"

namespace {

using namespace ts;
namespace fs = std::filesystem;

struct Entry {
  std::string name;
  Instance inst;
  BuildResult b;
  double seconds = 0;
};

struct Criterion {
  bool ok = true;
  std::vector<std::string> detail;
  void fail(const std::string& s) {
    ok = false;
    if (detail.size() < 8) detail.push_back(s);
  }
};

void report(int n, const std::string& title, const Criterion& c, const std::string& summary, bool& all) {
  std::cout << (c.ok ? "PASS" : "FAIL") << " " << n << " " << title << ": " << summary << "\n";
  for (const std::string& d : c.detail) std::cout << "    " << d << "\n";
  all = all && c.ok;
}

// --- brute-force trace oracle over adjacent swaps -----------------------

std::set<Word> commutation_class(const Word& w, const SymbolTable& t) {
  std::set<Word> seen{w};
  std::deque<Word> todo{w};
  while (!todo.empty()) {
    Word u = todo.front();
    todo.pop_front();
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      if (!t.independent(u[i], u[i + 1])) continue;
      Word v = u;
      std::swap(v[i], v[i + 1]);
      if (seen.insert(v).second) todo.push_back(v);
    }
  }
  return seen;
}

bool brute_equal(const Word& u, const Word& v, const SymbolTable& t) {
  return u.size() == v.size() && commutation_class(u, t).count(v) > 0;
}

bool brute_factor(const Word& v, const Word& w, const SymbolTable& t) {
  if (v.empty()) return true;
  for (const Word& u : commutation_class(w, t))
    if (std::search(u.begin(), u.end(), v.begin(), v.end()) != u.end()) return true;
  return false;
}

bool brute_reduced(const Word& w, const SymbolTable& t) {
  for (const Word& u : commutation_class(w, t))
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
      if (t.bar(u[i]) == u[i + 1]) return false;
  return true;
}

// Random alphabet: up to three resources, three letter pairs (one of them
// possibly self-involuting).
ResourceAlphabet random_alphabet(std::mt19937_64& rng) {
  ResourceAlphabet a({"r1", "r2", "r3"});
  std::uniform_int_distribution<int> rho(1, 7);
  a.add_base_pair("a", "A", static_cast<Mask>(rho(rng)));
  a.add_base_pair("b", "B", static_cast<Mask>(rho(rng)));
  if (rng() % 2) a.add_base_pair("s", "s", static_cast<Mask>(rho(rng)));
  else a.add_base_pair("c", "C", static_cast<Mask>(rho(rng)));
  return a;
}

Word random_word(std::mt19937_64& rng, const std::vector<Sym>& letters, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
  Word w(static_cast<std::size_t>(len(rng)));
  for (Sym& s : w) s = letters[pick(rng)];
  return w;
}

std::vector<Sym> non_marker_letters(const ResourceAlphabet& a) {
  std::vector<Sym> out;
  for (Sym s = 1; s < a.size(); ++s) out.push_back(s);
  return out;
}

std::string show(const Word& w) {
  std::ostringstream os;
  for (Sym s : w) os << s << ".";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run over the corpus"};
  std::string corpus = "corpus";
  int jobs = 0;
  app.add_option("--corpus", corpus, "directory of instance files")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads (0: all cores)");
  CLI11_PARSE(app, argc, argv);

  std::vector<Entry> entries;
  try {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(corpus))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) entries.push_back({f.stem().string(), load_instance(f.string()), {}, 0});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  SolveOptions opt;
  opt.bound = 3;
  opt.jobs = jobs;
  bool all = true;

  // 1. Oracle equivalence at bound 3.
  {
    Criterion c;
    double slowest = 0;
    std::set<std::string> names;
    for (Entry& e : entries) {
      names.insert(e.name);
      const auto t0 = std::chrono::steady_clock::now();
      e.b = build_nfa(e.inst, opt);
      const std::set<Tuple> got = nfa_solutions(e.b, 3);
      e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      slowest = std::max(slowest, e.seconds);
      for (const std::string& err : e.b.errors) c.fail(e.name + ": " + err);
      if (got != e.b.oracle)
        c.fail(e.name + ": automaton " + std::to_string(got.size()) + " vs oracle " + std::to_string(e.b.oracle.size()));
      if (e.seconds >= 10) c.fail(e.name + ": took " + std::to_string(e.seconds) + " s");
    }
    int randoms = 0;
    for (const std::string& n : names) randoms += n.rfind("rand", 0) == 0;
    if (entries.size() < 30) c.fail("only " + std::to_string(entries.size()) + " instances");
    for (const char* toy : {"toy1", "toy2", "toy3", "toy4"})
      if (!names.count(toy)) c.fail(std::string("missing ") + toy);
    if (randoms < 10) c.fail("only " + std::to_string(randoms) + " random instances");
    std::ostringstream os;
    os << entries.size() << " instances, slowest " << slowest << " s";
    report(1, "oracle equivalence", c, os.str(), all);
  }

  // 2. Edge replay and accepting paths.
  {
    Criterion c;
    long edges = 0, paths = 0;
    for (const Entry& e : entries) {
      edges += static_cast<long>(e.b.nfa.edges.size());
      for (const std::string& m : replay_edges(e.b.nfa)) c.fail(e.name + ": " + m);
      for (const AcceptingPath& p : enumerate_paths(e.b.nfa, 500)) {
        ++paths;
        const Tuple t = e.b.enc.decode(p.tuple);
        if (!oracle_accepts(e.inst, t)) c.fail(e.name + ": path tuple " + format_tuple(e.inst, t) + " is not a solution");
      }
    }
    report(2, "soundness replay", c, std::to_string(edges) + " edges, " + std::to_string(paths) + " paths", all);
  }

  // 3. Finiteness on the curated instances (status in the note).
  {
    Criterion c;
    int n = 0;
    SolveOptions o4 = opt;
    o4.bound = 4;
    for (const Entry& e : entries) {
      if (e.name.rfind("fin_", 0) != 0) continue;
      ++n;
      const nlohmann::json j = nlohmann::json::parse(std::ifstream(fs::path(corpus) / (e.name + ".json")));
      const std::string note = j.value("note", "");
      const bool infinite = note.rfind("infinite", 0) == 0;
      BuildResult b = build_nfa(e.inst, o4);
      FiniteVerdict v = finiteness(e.inst, b, 4, o4);
      if (infinite) {
        if (v.kind != FiniteVerdict::Kind::Infinite || !v.cycle) {
          c.fail(e.name + ": expected a cycle, got " + v.line());
          continue;
        }
        // The cycle must consist of edges of the automaton.
        std::set<std::pair<int, int>> es;
        for (const NfaEdge& x : b.nfa.edges) es.insert({x.src, x.dst});
        const std::vector<int>& cy = *v.cycle;
        for (std::size_t i = 0; i < cy.size(); ++i)
          if (!es.count({cy[i], cy[(i + 1) % cy.size()]})) c.fail(e.name + ": reported cycle is not a cycle");
      } else {
        std::size_t want = 0;
        std::istringstream(note.substr(std::string("finite").size())) >> want;
        if (v.kind != FiniteVerdict::Kind::Finite || v.count != want)
          c.fail(e.name + ": expected finite " + std::to_string(want) + ", got " + v.line());
      }
    }
    if (n != 10) c.fail(std::to_string(n) + " curated instances, expected 10");
    report(3, "finiteness verdicts", c, std::to_string(n) + " curated instances at bound 4", all);
  }

  // 4. Weight monotonicity along every guided path.
  {
    Criterion c;
    long steps = 0, compressions = 0;
    for (const Entry& e : entries) {
      for (const Seed& s : e.b.enc.seeds) {
        ForwardPath path;
        try {
          path = forward_path(e.b.enc.tasks[static_cast<std::size_t>(s.task)].initial, s.sol);
        } catch (const std::exception& ex) {
          c.fail(e.name + ": " + ex.what());
          continue;
        }
        const State* prev = &path.start;
        const Solution* prev_sol = &path.start_sol;
        for (const PathStep& st : path.steps) {
          ++steps;
          const long w0 = solution_weight(*prev, *prev_sol), w1 = solution_weight(st.to, st.sol);
          const bool final = st.label.kind == LabelKind::FinalCompression;
          if (!final && !(w1 < w0 || (w1 == w0 && st.to.weight() < prev->weight())))
            c.fail(e.name + ": (solution weight, weight) did not decrease in " + st.phase);
          if (st.label.kind == LabelKind::Compression) {
            ++compressions;
            if (!(st.to.weight() < prev->weight()))
              c.fail(e.name + ": Weight5 " + prev->weight().str() + " -> " + st.to.weight().str() + " in " + st.phase);
          }
          prev = &st.to;
          prev_sol = &st.sol;
        }
      }
    }
    report(4, "weight monotonicity", c,
           std::to_string(steps) + " steps, " + std::to_string(compressions) + " compression edges", all);
  }

  // 5, 6, 9. Engine statistics gathered while building (9 is printed last).
  Criterion budget;
  std::string budget_summary;
  {
    Criterion post, part;
    long calls = 0, max_len = 0, max_occ = 0;
    for (const Entry& e : entries) {
      const EngineStats& st = e.b.stats;
      for (const std::string& f : st.postcondition_failures) post.fail(e.name + ": " + f);
      calls += st.partition_calls;
      if (st.partition_shortfalls > 0)
        part.fail(e.name + ": " + std::to_string(st.partition_shortfalls) + " invocations below ceil(k/16)");
      for (const std::string& f : st.budget_failures) budget.fail(e.name + ": " + f);
      long limit = 0;
      for (const Task& t : e.b.enc.tasks) limit = std::max<long>(limit, t.problem->c_budget());
      if (st.max_length > limit || st.max_var_occurrences > limit)
        budget.fail(e.name + ": length " + std::to_string(st.max_length) + " over " + std::to_string(limit));
      max_len = std::max(max_len, st.max_length);
      max_occ = std::max(max_occ, st.max_var_occurrences);
    }
    report(5, "recompression postconditions", post, "checked after every fixed_resources and remove_resource_set", all);
    report(6, "partition bound", part, std::to_string(calls) + " pair compressions", all);
    budget_summary = "max length " + std::to_string(max_len) + ", max variable occurrences " + std::to_string(max_occ);
  }

  // 7. Trace core against brute force.
  {
    Criterion c;
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < 1000; ++i) {
      const ResourceAlphabet a = random_alphabet(rng);
      const SymbolTable& t = a.table();
      const std::vector<Sym> letters = non_marker_letters(a);
      const Word u = random_word(rng, letters, 8);
      // Half of the pairs are equal by construction.
      Word v = random_word(rng, letters, 8);
      if (i % 2 == 0) {
        const std::set<Word> cls = commutation_class(u, t);
        auto it = cls.begin();
        std::advance(it, static_cast<long>(rng() % cls.size()));
        v = *it;
      }
      if (trace_equal(u, v, t) != brute_equal(u, v, t)) c.fail("trace_equal " + show(u) + " " + show(v));
      const Word f = random_word(rng, letters, 3);
      if (factor_of(f, u, t) != brute_factor(f, u, t)) c.fail("factor_of " + show(f) + " in " + show(u));
      if (is_reduced(u, t) != brute_reduced(u, t)) c.fail("is_reduced " + show(u));
    }
    for (int i = 0; i < 1000; ++i) {
      const ResourceAlphabet a = random_alphabet(rng);
      const SymbolTable& t = a.table();
      const std::vector<Sym> letters = non_marker_letters(a);
      const ReductionMonoid nl = build_reduction_monoid(t, letters);
      const Word w = random_word(rng, letters, 8);
      int x = nl.monoid.unit();
      for (Sym s : w) x = nl.monoid.mul(x, nl.image[static_cast<std::size_t>(s)]);
      if (nl.monoid.is_zero(x) == is_reduced(w, t)) c.fail("N_L " + show(w));
    }
    report(7, "trace core vs brute force", c, "1000 random triples, 1000 random words for N_L", all);
  }

  // 8. Group mode.
  {
    Criterion c;
    int n = 0;
    for (const Entry& e : entries) {
      if (e.inst.mode != Mode::Group) continue;
      ++n;
      const std::set<Tuple> got = nfa_solutions(e.b, 3);
      if (got != e.b.oracle) c.fail(e.name + ": automaton differs from the group oracle");
      for (const Tuple& tu : got)
        for (const Word& w : tu)
          if (!is_reduced(w, e.inst.alphabet.table())) c.fail(e.name + ": " + format_word(e.inst, w) + " not reduced");
    }
    if (n < 5) c.fail(std::to_string(n) + " group instances, expected at least 5");
    report(8, "group mode", c, std::to_string(n) + " graph group instances at bound 3", all);
  }

  report(9, "budgets (factor 64)", budget, budget_summary, all);

  std::cout << (all ? "ALL PASS" : "SOME FAILED") << "\n";
  return all ? 0 : 1;
}
