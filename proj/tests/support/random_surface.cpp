#include "support/random_surface.hpp"

#include <sstream>
#include <vector>

namespace testsupport {

namespace {

enum class Ty { Bool, Col };

class Gen {
 public:
  Gen(std::mt19937_64& rng, std::size_t budget) : rng_(rng), budget_(budget) {}

  std::string expr(Ty t, int depth) {
    std::vector<int> choices{0, 0, 1};
    if (budget_ >= 1) choices.insert(choices.end(), {2, 2, 2});
    if (depth > 0) choices.insert(choices.end(), {3, 4, 5});
    switch (choices[pick(choices.size())]) {
      case 0:
        return literal(t);
      case 1:
        return variable(t);
      case 2:
        return random_choice(t, depth);
      case 3:
        return "(if " + expr(Ty::Bool, depth - 1) + " " + expr(t, depth - 1) + " " + expr(t, depth - 1) + ")";
      case 4: {
        Ty bound = coin() ? Ty::Bool : Ty::Col;
        std::string name = "v" + std::to_string(fresh_++);
        std::string rhs = expr(bound, depth - 1);
        scope_.push_back({name, bound});
        std::string body = expr(t, depth - 1);
        scope_.pop_back();
        return "(let ((" + name + " " + rhs + ")) " + body + ")";
      }
      default:
        if (t == Ty::Bool) {
          if (coin()) return "(not " + expr(Ty::Bool, depth - 1) + ")";
          return std::string(coin() ? "(and " : "(or ") + expr(Ty::Bool, depth - 1) + " " + expr(Ty::Bool, depth - 1) +
                 ")";
        }
        return "(match " + expr(Ty::Col, depth - 1) + " (r " + expr(t, depth - 1) + ") (g " + expr(t, depth - 1) +
               ") (_ " + expr(t, depth - 1) + "))";
    }
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 0; }

  std::string literal(Ty t) {
    if (t == Ty::Bool) return coin() ? "true" : "false";
    static const char* cols[] = {"r", "g", "b"};
    return cols[pick(3)];
  }

  std::string variable(Ty t) {
    std::vector<std::string> names;
    for (const auto& [n, ty] : scope_)
      if (ty == t) names.push_back(n);
    return names.empty() ? literal(t) : names[pick(names.size())];
  }

  std::string weight() {
    if (coin()) return "(param p" + std::to_string(pick(3)) + ")";
    std::ostringstream os;
    os << std::uniform_real_distribution<double>(0.05, 0.95)(rng_);
    return os.str();
  }

  std::string random_choice(Ty t, int depth) {
    int sub = depth > 0 ? depth - 1 : 0;
    if (t == Ty::Bool) {
      --budget_;
      return "(flip " + weight() + ")";
    }
    std::size_t k = std::min<std::size_t>(budget_ + 1, 2 + pick(2));
    budget_ -= k - 1;
    std::string out = "(freq ";
    bool symbolic = coin();
    if (symbolic) out += "(param s" + std::to_string(fresh_++) + ")";
    for (std::size_t i = 0; i < k; ++i) {
      std::string arm = sub > 0 && coin() ? expr(Ty::Col, sub) : literal(Ty::Col);
      if (symbolic)
        out += " " + arm;
      else
        out += " (" + std::to_string(1 + pick(4)) + " " + arm + ")";
    }
    return out + ")";
  }

  std::mt19937_64& rng_;
  std::size_t budget_;
  std::size_t fresh_ = 0;
  std::vector<std::pair<std::string, Ty>> scope_;
};

}  // namespace

std::string random_surface_program(std::mt19937_64& rng, std::size_t max_flips) {
  Gen g(rng, max_flips);
  std::string body;
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0:
      body = g.expr(Ty::Bool, 3);
      break;
    case 1:
      body = g.expr(Ty::Col, 3);
      break;
    default:
      body = "(tuple " + g.expr(Ty::Col, 2) + " " + g.expr(Ty::Bool, 2) + ")";
  }
  return "(type Col r g b)\n(main " + body + ")\n";
}

}  // namespace testsupport
