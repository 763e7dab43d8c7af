#include "gentune/surface/shape.hpp"

#include <stdexcept>

namespace gentune::surface {

std::size_t Shape::width() const {
  switch (kind) {
    case Kind::Bool: return 1;
    case Kind::Nat: return nat_width;
    case Kind::Tuple: {
      std::size_t w = 0;
      for (const auto& p : parts) w += p.width();
      return w;
    }
    case Kind::Adt: {
      std::size_t w = adt->tag_width();
      for (const auto& c : ctors)
        if (c)
          for (const auto& f : *c) w += f.width();
      return w;
    }
  }
  return 0;
}

void Shape::zeros_into(core::Bits& out) const { out.insert(out.end(), width(), false); }

void Shape::encode_into(const Value& v, core::Bits& out, bool& ok) const {
  switch (kind) {
    case Kind::Bool:
      if (v.kind != Value::Kind::Bool) ok = false;
      out.push_back(v.b);
      return;
    case Kind::Nat:
      if (v.kind != Value::Kind::Nat || (nat_width < 64 && (v.n >> nat_width) != 0)) ok = false;
      for (unsigned i = nat_width; i-- > 0;) out.push_back(i < 64 && ((v.n >> i) & 1u));
      return;
    case Kind::Tuple:
      if (v.kind != Value::Kind::Tuple || v.args.size() != parts.size()) {
        ok = false;
        zeros_into(out);
        return;
      }
      for (std::size_t i = 0; i < parts.size(); ++i) parts[i].encode_into(v.args[i], out, ok);
      return;
    case Kind::Adt: {
      if (v.kind != Value::Kind::Ctor || v.adt->name != adt->name || v.ctor >= ctors.size() || !ctors[v.ctor]) {
        ok = false;
        zeros_into(out);
        return;
      }
      unsigned tw = adt->tag_width();
      std::uint64_t tag = v.ctor + 1;
      for (unsigned i = tw; i-- > 0;) out.push_back((tag >> i) & 1u);
      for (std::size_t c = 0; c < ctors.size(); ++c) {
        if (!ctors[c]) continue;
        const auto& fields = *ctors[c];
        if (c == v.ctor) {
          if (v.args.size() != fields.size()) ok = false;
          for (std::size_t f = 0; f < fields.size(); ++f) {
            if (f < v.args.size()) fields[f].encode_into(v.args[f], out, ok);
            else fields[f].zeros_into(out);
          }
        } else {
          for (const auto& f : fields) f.zeros_into(out);
        }
      }
      return;
    }
  }
}

std::optional<core::Bits> Shape::encode(const Value& v) const {
  core::Bits out;
  out.reserve(width());
  bool ok = true;
  encode_into(v, out, ok);
  if (!ok) return std::nullopt;
  return out;
}

Value Shape::decode_from(const core::Bits& bits, std::size_t& pos) const {
  switch (kind) {
    case Kind::Bool: return Value::boolean(bits.at(pos++));
    case Kind::Nat: {
      std::uint64_t n = 0;
      for (unsigned i = 0; i < nat_width; ++i) n = (n << 1) | (bits.at(pos++) ? 1u : 0u);
      return Value::nat(n);
    }
    case Kind::Tuple: {
      std::vector<Value> vs;
      for (const auto& p : parts) vs.push_back(p.decode_from(bits, pos));
      return Value::tuple(std::move(vs));
    }
    case Kind::Adt: {
      std::uint64_t tag = 0;
      for (unsigned i = 0; i < adt->tag_width(); ++i) tag = (tag << 1) | (bits.at(pos++) ? 1u : 0u);
      if (tag == 0 || tag > ctors.size() || !ctors[tag - 1])
        throw std::runtime_error("decode: invalid tag " + std::to_string(tag) + " for type " + adt->name);
      Value out;
      for (std::size_t c = 0; c < ctors.size(); ++c) {
        if (!ctors[c]) continue;
        if (c + 1 == tag) {
          std::vector<Value> fs;
          for (const auto& f : *ctors[c]) fs.push_back(f.decode_from(bits, pos));
          out = Value::make(adt, static_cast<std::uint32_t>(c), std::move(fs));
        } else {
          for (const auto& f : *ctors[c]) pos += f.width();
        }
      }
      return out;
    }
  }
  throw std::logic_error("bad shape");
}

Value Shape::decode(const core::Bits& bits) const {
  std::size_t pos = 0;
  Value v = decode_from(bits, pos);
  if (pos != bits.size()) throw std::runtime_error("decode: bit count mismatch");
  return v;
}

std::string Shape::str() const {
  switch (kind) {
    case Kind::Bool: return "Bool";
    case Kind::Nat: return "(Nat " + std::to_string(nat_width) + ")";
    case Kind::Tuple: {
      std::string s = "(tuple";
      for (const auto& p : parts) s += " " + p.str();
      return s + ")";
    }
    case Kind::Adt: {
      std::string s = "(" + adt->name;
      for (std::size_t c = 0; c < ctors.size(); ++c) {
        if (!ctors[c]) continue;
        s += " (" + adt->ctors[c].name;
        for (const auto& f : *ctors[c]) s += " " + f.str();
        s += ")";
      }
      return s + ")";
    }
  }
  return "?";
}

namespace {
void product(const std::vector<std::vector<Value>>& choices, std::size_t i, std::vector<Value>& cur,
             std::vector<std::vector<Value>>& out, std::size_t budget) {
  if (i == choices.size()) {
    if (out.size() >= budget) throw std::length_error("shape enumeration budget exceeded");
    out.push_back(cur);
    return;
  }
  for (const auto& v : choices[i]) {
    cur.push_back(v);
    product(choices, i + 1, cur, out, budget);
    cur.pop_back();
  }
}
}  // namespace

std::vector<Value> Shape::enumerate(std::size_t budget) const {
  std::vector<Value> out;
  switch (kind) {
    case Kind::Bool: return {Value::boolean(false), Value::boolean(true)};
    case Kind::Nat:
      if (nat_width > 20 || (std::size_t{1} << nat_width) > budget) throw std::length_error("shape enumeration budget exceeded");
      for (std::uint64_t n = 0; n < (std::uint64_t{1} << nat_width); ++n) out.push_back(Value::nat(n));
      return out;
    case Kind::Tuple: {
      std::vector<std::vector<Value>> ch, rows;
      for (const auto& p : parts) ch.push_back(p.enumerate(budget));
      std::vector<Value> cur;
      product(ch, 0, cur, rows, budget);
      for (auto& r : rows) out.push_back(Value::tuple(std::move(r)));
      return out;
    }
    case Kind::Adt:
      for (std::size_t c = 0; c < ctors.size(); ++c) {
        if (!ctors[c]) continue;
        std::vector<std::vector<Value>> ch, rows;
        for (const auto& f : *ctors[c]) ch.push_back(f.enumerate(budget));
        std::vector<Value> cur;
        product(ch, 0, cur, rows, budget);
        for (auto& r : rows) {
          if (out.size() >= budget) throw std::length_error("shape enumeration budget exceeded");
          out.push_back(Value::make(adt, static_cast<std::uint32_t>(c), std::move(r)));
        }
      }
      return out;
  }
  return out;
}

}  // namespace gentune::surface
