#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gentune::surface {

struct Loc {
  std::string file;
  int line = 0;
  int col = 0;
  std::string str() const;
};

class SurfaceError : public std::runtime_error {
 public:
  SurfaceError(const Loc& loc, const std::string& msg) : std::runtime_error(loc.str() + ": " + msg), loc_(loc) {}
  const Loc& loc() const { return loc_; }

 private:
  Loc loc_;
};

struct Datum {
  enum class Kind { List, Symbol, Integer, Real };
  Kind kind = Kind::List;
  std::string text;  // symbol name or numeral spelling
  unsigned long long integer = 0;
  double real = 0.0;
  std::vector<Datum> items;
  Loc loc;

  bool is_symbol(const char* s = nullptr) const { return kind == Kind::Symbol && (!s || text == s); }
  bool is_list() const { return kind == Kind::List; }
  bool is_number() const { return kind == Kind::Integer || kind == Kind::Real; }
  double number() const { return kind == Kind::Integer ? static_cast<double>(integer) : real; }
  bool head_is(const char* s) const { return is_list() && !items.empty() && items[0].is_symbol(s); }
  std::string str() const;
};

std::vector<Datum> read_all(const std::string& text, const std::string& file = "<input>");
Datum read_one(const std::string& text, const std::string& file = "<input>");

}  // namespace gentune::surface
