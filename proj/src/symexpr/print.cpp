#include <sstream>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

namespace {

std::string rational_text(const Rational& r) {
  std::ostringstream out;
  out << numerator(r);
  if (denominator(r) != 1) out << '/' << denominator(r);
  return out.str();
}

bool negative_term(const Expr& e) {
  if (e.is_constant()) return e.constant() < 0;
  return e.kind() == NodeKind::Product && e.operands().front().is_constant() &&
         e.operands().front().constant() < 0;
}

class Printer {
 public:
  explicit Printer(const std::vector<std::string>& names) : names_(names) {}

  std::string run(const Expr& e) {
    emit(e);
    return out_.str();
  }

 private:
  void emit(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::Const: out_ << rational_text(e.constant()); break;
      case NodeKind::Var:
        if (e.var_index() < names_.size()) {
          out_ << names_[e.var_index()];
        } else {
          out_ << "x?" << e.var_index();
        }
        break;
      case NodeKind::Param: out_ << e.name(); break;
      case NodeKind::Sum: emit_sum(e); break;
      case NodeKind::Product: emit_product(e); break;
      case NodeKind::Power: {
        const Expr& b = e.operands()[0];
        bool paren = b.kind() == NodeKind::Sum || b.kind() == NodeKind::Product ||
                     b.kind() == NodeKind::Power ||
                     (b.is_constant() && (b.constant() < 0 || denominator(b.constant()) != 1));
        emit_wrapped(b, paren);
        if (e.exponent() < 0) {
          out_ << "^(" << e.exponent() << ')';
        } else {
          out_ << '^' << e.exponent();
        }
        break;
      }
      case NodeKind::Func:
        out_ << fn_name(e.fn()) << '(';
        emit(e.operands()[0]);
        out_ << ')';
        break;
      case NodeKind::Opaque:
        out_ << e.name() << std::string(static_cast<std::size_t>(e.order()), '\'') << '(';
        emit(e.operands()[0]);
        out_ << ')';
        break;
    }
  }

  void emit_wrapped(const Expr& e, bool paren) {
    if (paren) out_ << '(';
    emit(e);
    if (paren) out_ << ')';
  }

  void emit_sum(const Expr& e) {
    bool first = true;
    for (const auto& t : e.operands()) {
      if (first) {
        emit(t);
        first = false;
        continue;
      }
      if (negative_term(t)) {
        out_ << " - ";
        emit(-t);
      } else {
        out_ << " + ";
        emit(t);
      }
    }
  }

  void emit_product(const Expr& e) {
    const auto& f = e.operands();
    std::size_t start = 0;
    if (f.front().is_constant()) {
      const Rational& c = f.front().constant();
      if (c == -1) {
        out_ << '-';
      } else {
        out_ << rational_text(c) << '*';
      }
      start = 1;
    }
    for (std::size_t i = start; i < f.size(); ++i) {
      if (i > start) out_ << '*';
      bool paren = f[i].kind() == NodeKind::Sum || f[i].kind() == NodeKind::Product;
      emit_wrapped(f[i], paren);
    }
  }

  const std::vector<std::string>& names_;
  std::ostringstream out_;
};

}  // namespace

std::string print(const Expr& e, const std::vector<std::string>& names) {
  return Printer(names).run(e);
}

}  // namespace qbhkit
