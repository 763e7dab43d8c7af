#include "gentune/surface/sexpr.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>

namespace gentune::surface {

std::string Loc::str() const {
  return (file.empty() ? std::string("<input>") : file) + ":" + std::to_string(line) + ":" + std::to_string(col);
}

std::string Datum::str() const {
  if (kind != Kind::List) return text;
  std::string s = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ' ';
    s += items[i].str();
  }
  return s + ")";
}

namespace {

class Reader {
 public:
  Reader(const std::string& text, const std::string& file) : s_(text), file_(file) {}

  bool at_end() {
    skip();
    return pos_ >= s_.size();
  }

  Datum read() {
    skip();
    Loc loc = here();
    if (pos_ >= s_.size()) throw SurfaceError(loc, "unexpected end of input");
    char c = s_[pos_];
    if (c == ')') throw SurfaceError(loc, "unexpected ')'");
    if (c == '(' || c == '[') {
      char close = c == '(' ? ')' : ']';
      advance();
      Datum d;
      d.kind = Datum::Kind::List;
      d.loc = loc;
      while (true) {
        skip();
        if (pos_ >= s_.size()) throw SurfaceError(loc, "unclosed list");
        if (s_[pos_] == close) {
          advance();
          break;
        }
        if (s_[pos_] == ')' || s_[pos_] == ']') throw SurfaceError(here(), "mismatched bracket");
        d.items.push_back(read());
      }
      return d;
    }
    std::string tok;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')' && s_[pos_] != '[' && s_[pos_] != ']' && s_[pos_] != ';') {
      tok += s_[pos_];
      advance();
    }
    return atom(tok, loc);
  }

 private:
  Datum atom(const std::string& tok, const Loc& loc) {
    Datum d;
    d.loc = loc;
    d.text = tok;
    bool digits = !tok.empty();
    for (char ch : tok) digits &= std::isdigit(static_cast<unsigned char>(ch)) != 0;
    if (digits) {
      d.kind = Datum::Kind::Integer;
      errno = 0;
      d.integer = std::strtoull(tok.c_str(), nullptr, 10);
      if (errno) throw SurfaceError(loc, "integer literal out of range: " + tok);
      return d;
    }
    if (!tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) || (tok[0] == '.' && tok.size() > 1))) {
      char* end = nullptr;
      d.real = std::strtod(tok.c_str(), &end);
      if (end && *end == '\0') {
        d.kind = Datum::Kind::Real;
        return d;
      }
      throw SurfaceError(loc, "malformed number: " + tok);
    }
    d.kind = Datum::Kind::Symbol;
    return d;
  }

  Loc here() const { return Loc{file_, line_, col_}; }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

}  // namespace

std::vector<Datum> read_all(const std::string& text, const std::string& file) {
  Reader r(text, file);
  std::vector<Datum> out;
  while (!r.at_end()) out.push_back(r.read());
  return out;
}

Datum read_one(const std::string& text, const std::string& file) {
  Reader r(text, file);
  Datum d = r.read();
  if (!r.at_end()) throw SurfaceError(Loc{file, 1, 1}, "trailing input after datum");
  return d;
}

}  // namespace gentune::surface
