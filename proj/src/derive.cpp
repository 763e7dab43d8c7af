#include "gentune/derive.hpp"

#include <deque>
#include <set>
#include <sstream>

namespace gentune {

using surface::AdtDecl;
using surface::CtorDecl;
using surface::FieldType;

namespace {

std::string enum_type(const std::string& t) { return t + "C"; }
std::string enum_ctor(const std::string& c) { return c + "C"; }
std::string helper_name(const std::string& t) { return "gen" + t + "Helper"; }
std::string terminal_name(const std::string& t) { return "genTerminal" + t; }

// True when `from` can reach a value of type `target` through constructor fields.
bool reaches(const surface::Program& p, const std::string& from, const std::string& target) {
  std::set<std::string> seen;
  std::vector<std::string> work{from};
  while (!work.empty()) {
    std::string n = work.back();
    work.pop_back();
    if (n == target) return true;
    if (!seen.insert(n).second) continue;
    for (const auto& c : p.adt(n).ctors)
      for (const auto& f : c.fields)
        if (f.kind == FieldType::Kind::Adt) work.push_back(f.adt);
  }
  return false;
}

bool is_recursive(const surface::Program& p, const AdtDecl& t, const CtorDecl& c) {
  for (const auto& f : c.fields)
    if (f.kind == FieldType::Kind::Adt && reaches(p, f.adt, t.name)) return true;
  return false;
}

// Builtin field generator: every bit (or the boolean itself) is a dependent
// flip over `deps`.
std::string builtin_gen(const FieldType& f, const std::string& site, const std::string& deps) {
  if (f.kind == FieldType::Kind::Bool)
    return "(freqdep (param " + site + ") " + deps + " true false)";
  std::string out;
  unsigned w = f.width;
  if (w == 0) return "0";
  for (unsigned i = 0; i + 1 < w; ++i) out += "(+ ";
  for (unsigned i = 0; i < w; ++i) {
    unsigned bit = w - 1 - i;
    std::string b = "(if (freqdep (param " + site + "_b" + std::to_string(bit) + ") " + deps +
                    " true false) " + std::to_string(std::uint64_t{1} << bit) + " 0)";
    out += i == 0 ? b : " " + b + ")";
  }
  return out;
}

std::string apply_ctor(const std::string& name, const std::vector<std::string>& fields) {
  if (fields.empty()) return name;
  std::string s = "(" + name;
  for (const auto& f : fields) s += " " + f;
  return s + ")";
}

class Deriver {
 public:
  Deriver(const surface::Program& p, const DeriveConfig& cfg) : p_(p), cfg_(cfg) {}

  DerivedGenerator run() {
    if (!p_.types.count(cfg_.root)) throw DeriveError("unknown root type: " + cfg_.root);
    collect();
    std::ostringstream body;
    for (const auto& t : order_) body << helper(p_.adt(t)) << "\n";
    for (const auto& t : order_) body << terminal_def(p_.adt(t)) << "\n";

    const AdtDecl& root = p_.adt(cfg_.root);
    std::string roots;
    for (const auto& c : root.ctors) roots += " " + enum_ctor(c.name);
    body << "(define (gen" << root.name << ")\n  (" << helper_name(root.name) << " " << cfg_.initial_size
         << " LNil (freqdep (param " << root.name << "_root) (tuple)" << roots << ")))\n\n";
    body << "(main (gen" << root.name << "))\n";

    std::ostringstream out;
    out << "; derived generator for " << cfg_.root << ", size " << cfg_.initial_size << ", lookback "
        << cfg_.lookback << "\n";
    for (const auto& name : p_.type_order) {
      const AdtDecl& t = p_.adt(name);
      out << "(type " << t.name;
      for (const auto& c : t.ctors) {
        std::vector<std::string> fs;
        for (const auto& f : c.fields) fs.push_back(f.str());
        out << " " << apply_ctor(c.name, fs);
      }
      out << ")\n";
    }
    for (const auto& t : order_) {
      out << "(type " << enum_type(t);
      for (const auto& c : p_.adt(t).ctors) out << " " << enum_ctor(c.name);
      out << ")\n";
    }
    unsigned loc_width = std::max(1u, surface::bit_width(locs_.issued()));
    out << "(type LocStack LNil (LCons (Nat " << loc_width << ") LocStack))\n\n";
    out << "(define (firstN k s)\n  (match k\n    (0 LNil)\n    ((S j) (match s (LNil LNil) ((LCons x rest) "
           "(LCons x (firstN j rest)))))))\n\n";
    out << body.str();
    return {out.str(), locs_.issued()};
  }

  std::string terminal_body(const AdtDecl& t, const std::string& deps) const {
    std::vector<std::string> options;
    for (const auto& c : t.ctors) {
      if (is_recursive(p_, t, c)) continue;
      std::vector<std::string> fs;
      for (std::size_t i = 0; i < c.fields.size(); ++i) {
        const FieldType& f = c.fields[i];
        if (f.kind == FieldType::Kind::Adt)
          fs.push_back("(" + terminal_name(f.adt) + " " + deps + ")");
        else
          fs.push_back(builtin_gen(f, t.name + "_term_" + c.name + "_f" + std::to_string(i), deps));
      }
      options.push_back(apply_ctor(c.name, fs));
    }
    if (options.empty()) throw DeriveError("type " + t.name + " has no non-recursive constructor");
    std::string s = "(freqdep (param " + t.name + "_terminal) " + deps;
    for (const auto& o : options) s += "\n    " + o;
    return s + ")";
  }

 private:
  void collect() {
    std::deque<std::string> work{cfg_.root};
    std::set<std::string> seen{cfg_.root};
    while (!work.empty()) {
      std::string name = work.front();
      work.pop_front();
      const AdtDecl& t = p_.adt(name);
      if (name == "Option") throw DeriveError("the builtin Option type cannot be derived");
      order_.push_back(name);
      for (const auto& c : t.ctors)
        for (const auto& f : c.fields) {
          if (f.kind == FieldType::Kind::Any)
            throw DeriveError("constructor " + c.name + " has a field of unknown type");
          if (f.kind == FieldType::Kind::Adt && seen.insert(f.adt).second) work.push_back(f.adt);
        }
    }
  }

  std::string helper(const AdtDecl& t) {
    std::ostringstream s;
    s << "(define (" << helper_name(t.name) << " size stack chosen)\n";
    bool recursive = false;
    for (const auto& c : t.ctors) recursive = recursive || is_recursive(p_, t, c);
    if (!recursive) {
      // No size recursion: the caller's choice of constructor is final.
      s << "  (match chosen";
      for (const auto& c : t.ctors) s << "\n    (" << enum_ctor(c.name) << "\n     " << arm(t, c, "size") << ")";
      s << "))\n";
      return s.str();
    }
    s
      << "  (match size\n"
      << "    (0 (" << terminal_name(t.name) << " (tuple size stack chosen)))\n"
      << "    ((S n)\n     (match chosen";
    for (const auto& c : t.ctors) s << "\n       (" << enum_ctor(c.name) << "\n        " << arm(t, c, "n") << ")";
    s << "))))\n";
    return s.str();
  }

  std::string arm(const AdtDecl& t, const CtorDecl& c, const std::string& child_size) {
    const std::string deps = "(tuple size stack " + enum_ctor(c.name) + ")";
    // Product of the child constructor choices; builtin fields contribute a
    // single unit placeholder.
    std::vector<std::vector<std::string>> axes;
    bool inductive = false;
    for (const auto& f : c.fields) {
      if (f.kind == FieldType::Kind::Adt) {
        inductive = true;
        std::vector<std::string> opts;
        for (const auto& cc : p_.adt(f.adt).ctors) opts.push_back(enum_ctor(cc.name));
        axes.push_back(opts);
      } else {
        axes.push_back({"(tuple)"});
      }
    }
    std::vector<std::string> fs;
    for (std::size_t i = 0; i < c.fields.size(); ++i) {
      const FieldType& f = c.fields[i];
      if (f.kind == FieldType::Kind::Adt) {
        unsigned loc = locs_.fresh_loc();
        fs.push_back("(" + helper_name(f.adt) + " " + child_size + " (firstN " + std::to_string(cfg_.lookback) + " (LCons " +
                     std::to_string(loc) + " stack)) (get " + std::to_string(i) + " choices))");
      } else {
        fs.push_back(builtin_gen(f, t.name + "_" + c.name + "_f" + std::to_string(i), deps));
      }
    }
    std::string built = apply_ctor(c.name, fs);
    if (!inductive) return built;

    std::vector<std::string> combos{""};
    for (const auto& axis : axes) {
      std::vector<std::string> next;
      for (const auto& prefix : combos)
        for (const auto& o : axis) next.push_back(prefix + " " + o);
      combos = std::move(next);
    }
    std::string choice = "(freqdep (param " + t.name + "_" + c.name + "_args) " + deps;
    for (const auto& combo : combos) choice += "\n          (tuple" + combo + ")";
    choice += ")";
    return "(let ((choices " + choice + "))\n          " + built + ")";
  }

  std::string terminal_def(const AdtDecl& t) const {
    return "(define (" + terminal_name(t.name) + " deps)\n  " + terminal_body(t, "deps") + ")\n";
  }

  const surface::Program& p_;
  DeriveConfig cfg_;
  std::vector<std::string> order_;
  LocationCounter locs_;
};

}  // namespace

DerivedGenerator derive_generator(const surface::Program& types, const DeriveConfig& cfg) {
  return Deriver(types, cfg).run();
}

std::string gen_terminal(const surface::Program& types, const std::string& type, const std::string& deps) {
  DeriveConfig cfg;
  cfg.root = type;
  return Deriver(types, cfg).terminal_body(types.adt(type), deps);
}

}  // namespace gentune
