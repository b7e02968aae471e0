#include "tracesolve/instance.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace ts {

using nlohmann::json;

namespace {

class Loader {
 public:
  explicit Loader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& where, const std::string& what) const {
    throw Error(source_ + ": " + where + ": " + what);
  }

  const json& field(const json& j, const std::string& key, const std::string& where) const {
    if (!j.is_object() || !j.contains(key)) fail(where, "missing field '" + key + "'");
    return j.at(key);
  }

  std::string str(const json& j, const std::string& where) const {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
  }

  Mask rho(const json& j, const std::vector<std::string>& res, const std::string& where) const {
    if (!j.is_array()) fail(where, "expected an array of resource names");
    Mask m = 0;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string r = str(j[i], where + "[" + std::to_string(i) + "]");
      auto it = std::find(res.begin(), res.end(), r);
      if (it == res.end()) fail(where, "unknown resource '" + r + "'");
      m |= static_cast<Mask>(1u << (it - res.begin()));
    }
    if (m == 0)
      fail(where, "empty resource sets are not supported (the preprocessing for such letters is not implemented)");
    return m;
  }

  // Element given by name or index.
  int element(const json& j, const Instance& inst, const std::string& where) const {
    if (j.is_number_integer()) {
      const int e = j.get<int>();
      if (e < 0 || e >= inst.n_elements) fail(where, "element index out of range");
      return e;
    }
    const std::string n = str(j, where);
    for (int e = 0; e < inst.n_elements; ++e)
      if (inst.element_names[static_cast<std::size_t>(e)] == n) return e;
    fail(where, "unknown monoid element '" + n + "'");
  }

 private:
  std::string source_;
};

}  // namespace

std::vector<Sym> Instance::letters_for(int var) const {
  std::vector<Sym> out;
  const Mask r = variables[static_cast<std::size_t>(var)].rho;
  for (Sym a = 1; a < alphabet.size(); ++a)
    if (subset(alphabet.table().rho(a), r)) out.push_back(a);
  return out;
}

int Instance::eval(const Word& w) const {
  int m = unit;
  for (Sym a : w) m = mul(m, letter_mu[static_cast<std::size_t>(a)]);
  return m;
}

std::string Instance::symbol_name(Sym s) const {
  if (!is_var(s)) return alphabet.name(s);
  const auto& v = variables[static_cast<std::size_t>(var_index(s))];
  return is_var_bar(s) ? v.bar : v.name;
}

Instance parse_instance(const json& j, const std::string& source) {
  Loader ld(source);
  Instance inst;
  inst.source = source;
  if (j.contains("schema") && j.at("schema") != "tracesolve-instance/1")
    ld.fail("schema", "unsupported schema (expected tracesolve-instance/1)");
  if (j.contains("mode")) {
    const std::string m = ld.str(j.at("mode"), "mode");
    if (m == "monoid") {
      inst.mode = Mode::Monoid;
    } else if (m == "group") {
      inst.mode = Mode::Group;
    } else {
      ld.fail("mode", "expected \"monoid\" or \"group\"");
    }
  }

  const json& res = ld.field(j, "resources", "resources");
  if (!res.is_array() || res.empty()) ld.fail("resources", "expected a non-empty array");
  if (res.size() > static_cast<std::size_t>(kMaxUserResources))
    ld.fail("resources", "at most " + std::to_string(kMaxUserResources) + " resources are supported");
  for (std::size_t i = 0; i < res.size(); ++i) {
    const std::string r = ld.str(res[i], "resources[" + std::to_string(i) + "]");
    if (std::find(inst.resources.begin(), inst.resources.end(), r) != inst.resources.end())
      ld.fail("resources", "duplicate resource '" + r + "'");
    inst.resources.push_back(r);
  }
  inst.alphabet = ResourceAlphabet(inst.resources);

  // Letters. An entry declares a letter together with its partner; a
  // partner may also be listed separately with consistent data.
  const json& cs = ld.field(j, "constants", "constants");
  if (!cs.is_array()) ld.fail("constants", "expected an array");
  std::map<std::string, std::pair<std::string, Mask>> declared;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string w = "constants[" + std::to_string(i) + "]";
    const std::string name = ld.str(ld.field(cs[i], "name", w), w + ".name");
    const std::string bar = cs[i].contains("bar") ? ld.str(cs[i].at("bar"), w + ".bar") : name;
    const Mask r = ld.rho(ld.field(cs[i], "rho", w), inst.resources, w + ".rho");
    if (name == "#" || bar == "#") ld.fail(w, "'#' is reserved for the marker");
    if (name.empty() || bar.empty()) ld.fail(w, "empty letter name");
    auto it = declared.find(name);
    if (it != declared.end()) {
      if (it->second != std::make_pair(bar, r)) ld.fail(w, "letter '" + name + "' redeclared inconsistently");
      continue;
    }
    if (declared.count(bar)) ld.fail(w, "partner '" + bar + "' already belongs to another letter");
    if (inst.mode == Mode::Group && bar == name)
      ld.fail(w, "group generators cannot be their own inverse");
    declared[name] = {bar, r};
    declared[bar] = {name, r};
    try {
      inst.alphabet.add_base_pair(name, bar, r);
    } catch (const Error& e) {
      ld.fail(w, e.what());
    }
  }

  // Constraint monoid.
  if (j.contains("monoid")) {
    const json& m = j.at("monoid");
    const json& el = ld.field(m, "elements", "monoid");
    if (!el.is_array() || el.empty()) ld.fail("monoid.elements", "expected a non-empty array");
    inst.element_names.clear();
    for (std::size_t i = 0; i < el.size(); ++i) inst.element_names.push_back(ld.str(el[i], "monoid.elements"));
    inst.n_elements = static_cast<int>(el.size());
    inst.unit = ld.element(ld.field(m, "unit", "monoid"), inst, "monoid.unit");
    if (m.contains("zero") && !m.at("zero").is_null()) inst.zero = ld.element(m.at("zero"), inst, "monoid.zero");
    const json& mt = ld.field(m, "mult", "monoid");
    if (!mt.is_array() || mt.size() != el.size()) ld.fail("monoid.mult", "expected an n x n table");
    inst.mult.assign(static_cast<std::size_t>(inst.n_elements * inst.n_elements), 0);
    for (int x = 0; x < inst.n_elements; ++x) {
      const json& row = mt[static_cast<std::size_t>(x)];
      if (!row.is_array() || row.size() != el.size()) ld.fail("monoid.mult", "expected an n x n table");
      for (int y = 0; y < inst.n_elements; ++y)
        inst.mult[static_cast<std::size_t>(x * inst.n_elements + y)] =
            ld.element(row[static_cast<std::size_t>(y)], inst, "monoid.mult");
    }
    const json& iv = ld.field(m, "inv", "monoid");
    if (!iv.is_array() || iv.size() != el.size()) ld.fail("monoid.inv", "expected one entry per element");
    inst.inv.clear();
    for (std::size_t x = 0; x < iv.size(); ++x) inst.inv.push_back(ld.element(iv[x], inst, "monoid.inv"));
    // Monoid and involution laws.
    const int n = inst.n_elements;
    for (int x = 0; x < n; ++x) {
      if (inst.mul(inst.unit, x) != x || inst.mul(x, inst.unit) != x) ld.fail("monoid.unit", "not a unit");
      if (inst.inv[static_cast<std::size_t>(inst.inv[static_cast<std::size_t>(x)])] != x)
        ld.fail("monoid.inv", "not an involution");
      if (inst.zero >= 0 && (inst.mul(inst.zero, x) != inst.zero || inst.mul(x, inst.zero) != inst.zero))
        ld.fail("monoid.zero", "not absorbing");
      for (int y = 0; y < n; ++y) {
        if (inst.inv[static_cast<std::size_t>(inst.mul(x, y))] !=
            inst.mul(inst.inv[static_cast<std::size_t>(y)], inst.inv[static_cast<std::size_t>(x)]))
          ld.fail("monoid.inv", "involution is not an anti-automorphism");
        for (int z = 0; z < n; ++z)
          if (inst.mul(inst.mul(x, y), z) != inst.mul(x, inst.mul(y, z)))
            ld.fail("monoid.mult", "multiplication is not associative");
      }
    }
  }
  inst.letter_mu.assign(static_cast<std::size_t>(inst.alphabet.size()), inst.unit);
  inst.letter_mu[0] = -1;
  if (j.contains("monoid") && j.at("monoid").contains("images")) {
    const json& im = j.at("monoid").at("images");
    if (!im.is_object()) ld.fail("monoid.images", "expected an object from letter names to elements");
    std::set<Sym> given;
    for (auto it = im.begin(); it != im.end(); ++it) {
      const Sym a = inst.alphabet.find(it.key());
      if (a == kNone || a == 0) ld.fail("monoid.images", "unknown letter '" + it.key() + "'");
      inst.letter_mu[static_cast<std::size_t>(a)] = ld.element(it.value(), inst, "monoid.images." + it.key());
      given.insert(a);
    }
    for (Sym a = 1; a < inst.alphabet.size(); ++a) {
      const Sym b = inst.alphabet.table().bar(a);
      const int ia = inst.letter_mu[static_cast<std::size_t>(a)];
      if (!given.count(a) && given.count(b)) {
        inst.letter_mu[static_cast<std::size_t>(a)] = inst.inv[static_cast<std::size_t>(inst.letter_mu[static_cast<std::size_t>(b)])];
      } else if (given.count(a) && given.count(b) && inst.letter_mu[static_cast<std::size_t>(b)] != inst.inv[static_cast<std::size_t>(ia)]) {
        ld.fail("monoid.images", "image of '" + inst.alphabet.name(b) + "' is not the involution of '" +
                                     inst.alphabet.name(a) + "'");
      }
    }
  }
  for (Sym a = 1; a < inst.alphabet.size(); ++a) {
    const int ia = inst.letter_mu[static_cast<std::size_t>(a)];
    if (inst.zero >= 0 && ia == inst.zero) ld.fail("monoid.images", "letter '" + inst.alphabet.name(a) + "' maps to zero");
    for (Sym b = 1; b < inst.alphabet.size(); ++b) {
      if (!inst.alphabet.table().independent(a, b)) continue;
      const int ib = inst.letter_mu[static_cast<std::size_t>(b)];
      if (inst.mul(ia, ib) != inst.mul(ib, ia))
        ld.fail("monoid.images", "independent letters '" + inst.alphabet.name(a) + "' and '" +
                                     inst.alphabet.name(b) + "' have non-commuting images");
    }
  }

  // Variables.
  const json& vs = ld.field(j, "variables", "variables");
  if (!vs.is_array()) ld.fail("variables", "expected an array");
  std::vector<Instance::Variable> vars;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string w = "variables[" + std::to_string(i) + "]";
    Instance::Variable v;
    v.name = ld.str(ld.field(vs[i], "name", w), w + ".name");
    v.bar = vs[i].contains("bar") ? ld.str(vs[i].at("bar"), w + ".bar") : v.name + "~";
    if (v.bar == v.name) ld.fail(w, "a variable cannot be its own involution");
    for (const std::string& n : {v.name, v.bar})
      if (inst.alphabet.find(n) != kNone) ld.fail(w, "name '" + n + "' is already a letter");
    v.rho = vs[i].contains("rho") ? ld.rho(vs[i].at("rho"), inst.resources, w + ".rho") : inst.alphabet.full();
    v.mu = vs[i].contains("mu") ? ld.element(vs[i].at("mu"), inst, w + ".mu") : inst.unit;
    vars.push_back(v);
  }
  // Distinguished order: every variable exactly once.
  if (j.contains("distinguished")) {
    const json& d = j.at("distinguished");
    if (!d.is_array() || d.size() != vars.size())
      ld.fail("distinguished", "must list every variable exactly once");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string n = ld.str(d[i], "distinguished");
      auto it = std::find_if(vars.begin(), vars.end(), [&](const auto& v) { return v.name == n; });
      if (it == vars.end() || !seen.insert(n).second)
        ld.fail("distinguished", "must list every variable exactly once");
      inst.variables.push_back(*it);
    }
  } else {
    inst.variables = vars;
  }
  std::set<std::string> names;
  for (const auto& v : inst.variables)
    if (!names.insert(v.name).second || !names.insert(v.bar).second)
      ld.fail("variables", "duplicate variable name '" + v.name + "'");

  inst.table = inst.alphabet.table();
  for (int i = 0; i < inst.k(); ++i) {
    SymInfo si;
    si.kind = Kind::Variable;
    si.rho = inst.variables[static_cast<std::size_t>(i)].rho;
    si.bar = inst.var_sym(i) + 1;
    inst.table.set(inst.var_sym(i), si);
    si.bar = inst.var_sym(i);
    inst.table.set(inst.var_sym(i) + 1, si);
  }

  const json& eq = ld.field(j, "equation", "equation");
  auto side = [&](const char* key) {
    const json& s = ld.field(eq, key, "equation");
    if (!s.is_array()) ld.fail(std::string("equation.") + key, "expected an array of symbol names");
    Word w;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string n = ld.str(s[i], std::string("equation.") + key);
      Sym a = inst.alphabet.find(n);
      if (a == 0) ld.fail(std::string("equation.") + key, "the marker cannot appear in an equation");
      if (a == kNone) {
        for (int v = 0; v < inst.k(); ++v) {
          if (inst.variables[static_cast<std::size_t>(v)].name == n) a = inst.var_sym(v);
          if (inst.variables[static_cast<std::size_t>(v)].bar == n) a = inst.var_sym(v) + 1;
        }
      }
      if (a == kNone) ld.fail(std::string("equation.") + key, "unknown symbol '" + n + "'");
      w.push_back(a);
    }
    return w;
  };
  inst.lhs = side("lhs");
  inst.rhs = side("rhs");
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(path + ": invalid JSON: " + e.what());
  }
  return parse_instance(j, path);
}

std::string format_word(const Instance& inst, const Word& w) {
  bool short_names = true;
  for (Sym a : w) short_names = short_names && inst.alphabet.name(a).size() == 1;
  std::string out;
  for (Sym a : w) {
    if (!short_names && !out.empty()) out += '.';
    out += inst.alphabet.name(a);
  }
  return out;
}

std::string format_tuple(const Instance& inst, const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += format_word(inst, t[i]);
  }
  return out + ")";
}

Word parse_word(const Instance& inst, const json& j) {
  Word w;
  auto letter = [&](const std::string& n) {
    const Sym a = inst.alphabet.find(n);
    if (a == kNone || a == 0) throw Error("unknown letter '" + n + "'");
    w.push_back(a);
  };
  if (j.is_array()) {
    for (const auto& x : j) letter(x.get<std::string>());
    return w;
  }
  const std::string s = j.get<std::string>();
  if (s.find('.') != std::string::npos) {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, '.'))
      if (!part.empty()) letter(part);
  } else {
    for (char c : s) letter(std::string(1, c));
  }
  return w;
}

}  // namespace ts
