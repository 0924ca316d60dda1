#include "expr_parser.hpp"

#include <cctype>
#include <stdexcept>

namespace qes::detail {

namespace {

void add_into(FormalSum& acc, const FormalSum& b, int sign) {
  for (const auto& [d, c] : b) {
    auto& slot = acc[d];
    if (sign > 0) {
      slot += c;
    } else {
      slot -= c;
    }
    if (slot.is_zero()) acc.erase(d);
  }
}

FormalSum multiply(const FormalSum& a, const FormalSum& b) {
  FormalSum out;
  for (const auto& [da, ca] : a) {
    for (const auto& [db, cb] : b) {
      Exponents d;
      for (std::size_t i = 0; i < kNumVars; ++i) d[i] = da[i] + db[i];
      auto& slot = out[d];
      slot += ca * cb;
      if (slot.is_zero()) out.erase(d);
    }
  }
  return out;
}

FormalSum constant(const Rational& r) {
  FormalSum s;
  if (r != 0) s.emplace(Exponents{}, MultiPoly(r));
  return s;
}

class Parser {
 public:
  Parser(std::string_view text, const std::map<std::string, Rational>& constants)
      : text_(text), constants_(constants) {}

  FormalSum parse() {
    FormalSum v = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse error at offset " + std::to_string(pos_) + " in '" +
                                std::string(text_) + "': " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  FormalSum expr() {
    FormalSum acc;
    int sign = 1;
    if (accept('-')) {
      sign = -1;
    } else {
      accept('+');
    }
    add_into(acc, term(), sign);
    while (true) {
      if (accept('+')) {
        add_into(acc, term(), 1);
      } else if (accept('-')) {
        add_into(acc, term(), -1);
      } else {
        break;
      }
    }
    return acc;
  }

  FormalSum term() {
    FormalSum acc = power();
    while (true) {
      if (accept('*')) {
        acc = multiply(acc, power());
      } else if (accept('/')) {
        FormalSum d = power();
        if (d.size() != 1 || d.begin()->first != Exponents{} || !d.begin()->second.is_constant())
          fail("division is only supported by nonzero constants");
        const Rational c = d.begin()->second.constant_term();
        for (auto& [k, v] : acc) v.scale(1 / c);
      } else {
        break;
      }
    }
    return acc;
  }

  FormalSum power() {
    FormalSum base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      const unsigned long k = std::stoul(std::string(text_.substr(start, pos_ - start)));
      FormalSum out = constant(1);
      for (unsigned long i = 0; i < k; ++i) out = multiply(out, base);
      return out;
    }
    return base;
  }

  FormalSum primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      FormalSum v = expr();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (c == '-') {
      ++pos_;
      FormalSum v = power();
      for (auto& [k, p] : v) p = -p;
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return constant(Rational(BigInt(std::string(text_.substr(start, pos_ - start)), 10)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      return identifier(name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  FormalSum identifier(const std::string& name) {
    if (name.size() == 1) {
      if (auto v = var_from_name(name[0])) {
        FormalSum s;
        s.emplace(Exponents{}, MultiPoly::var(*v));
        return s;
      }
    }
    if (name.size() >= 2 && name[0] == 'D') {
      Exponents d{};
      bool ok = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        auto v = var_from_name(name[i]);
        if (!v) {
          ok = false;
          break;
        }
        ++d[static_cast<std::size_t>(*v)];
      }
      if (ok) {
        FormalSum s;
        s.emplace(d, MultiPoly(1));
        return s;
      }
    }
    auto it = constants_.find(name);
    if (it == constants_.end()) fail("unknown symbol '" + name + "'");
    return constant(it->second);
  }

  std::string_view text_;
  const std::map<std::string, Rational>& constants_;
  std::size_t pos_ = 0;
};

}  // namespace

FormalSum parse_formal(std::string_view text, const std::map<std::string, Rational>& constants) {
  return Parser(text, constants).parse();
}

}  // namespace qes::detail
