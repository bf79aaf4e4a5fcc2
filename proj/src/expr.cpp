#include "liftcount/expr.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace liftcount {

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

bool is_const(const ExprPtr& e, long v) {
  return e->kind == Expr::Const && e->value == v;
}

bool const_long(const ExprPtr& e, long& out) {
  if (e->kind != Expr::Const) return false;
  if (e->value.get_den() != 1) return false;
  if (!e->value.get_num().fits_slong_p()) return false;
  out = e->value.get_num().get_si();
  return true;
}

}  // namespace

ExprPtr num(const Rational& v) {
  Expr e;
  e.kind = Expr::Const;
  e.value = v;
  e.value.canonicalize();
  return make(std::move(e));
}

ExprPtr num(long v) { return num(Rational(v)); }

ExprPtr param(const std::string& name) {
  Expr e;
  e.kind = Expr::Param;
  e.name = name;
  return make(std::move(e));
}

ExprPtr add(std::vector<ExprPtr> kids) {
  if (kids.empty()) return num(0);
  if (kids.size() == 1) return kids[0];
  Expr e;
  e.kind = Expr::Add;
  e.kids = std::move(kids);
  return make(std::move(e));
}

ExprPtr mul(std::vector<ExprPtr> kids) {
  if (kids.empty()) return num(1);
  if (kids.size() == 1) return kids[0];
  Expr e;
  e.kind = Expr::Mul;
  e.kids = std::move(kids);
  return make(std::move(e));
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = Expr::Sub;
  e.kids = {std::move(a), std::move(b)};
  return make(std::move(e));
}

ExprPtr pow_expr(ExprPtr base, ExprPtr exp) {
  Expr e;
  e.kind = Expr::Pow;
  e.kids = {std::move(base), std::move(exp)};
  return make(std::move(e));
}

ExprPtr sum_expr(const std::string& var, ExprPtr upper, ExprPtr body) {
  Expr e;
  e.kind = Expr::Sum;
  e.name = var;
  e.kids = {std::move(upper), std::move(body)};
  return make(std::move(e));
}

ExprPtr binom(ExprPtr n, ExprPtr k) {
  Expr e;
  e.kind = Expr::Binom;
  e.kids = {std::move(n), std::move(k)};
  return make(std::move(e));
}

ExprPtr lt(ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = Expr::Lt;
  e.kids = {std::move(a), std::move(b)};
  return make(std::move(e));
}

ExprPtr eq(ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = Expr::Eq;
  e.kids = {std::move(a), std::move(b)};
  return make(std::move(e));
}

ExprPtr count_leaf(Clause c, std::map<DomainId, ExprPtr> env) {
  Expr e;
  e.kind = Expr::Count;
  e.clause = std::move(c);
  e.env = std::move(env);
  return make(std::move(e));
}

ExprPtr oracle_leaf(Formula f, std::map<DomainId, ExprPtr> env) {
  Expr e;
  e.kind = Expr::Oracle;
  e.formula = std::move(f);
  e.env = std::move(env);
  return make(std::move(e));
}

ExprPtr call(const std::string& fn, std::vector<ExprPtr> args) {
  Expr e;
  e.kind = Expr::Call;
  e.name = fn;
  e.kids = std::move(args);
  return make(std::move(e));
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->value != b->value)
    return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  if (!(a->clause == b->clause) || !(a->formula == b->formula)) return false;
  if (a->env.size() != b->env.size()) return false;
  for (auto ia = a->env.begin(), ib = b->env.begin(); ia != a->env.end();
       ++ia, ++ib)
    if (ia->first != ib->first || !expr_equal(ia->second, ib->second))
      return false;
  return true;
}

ExprPtr substitute_param(const ExprPtr& e, const std::string& name,
                         const ExprPtr& with) {
  if (e->kind == Expr::Param) return e->name == name ? with : e;
  if (e->kind == Expr::Sum && e->name == name) {
    // shadowed: only the upper bound is in scope
    Expr out = *e;
    out.kids[0] = substitute_param(e->kids[0], name, with);
    return make(std::move(out));
  }
  bool changed = false;
  Expr out = *e;
  for (ExprPtr& k : out.kids) {
    ExprPtr r = substitute_param(k, name, with);
    if (r != k) changed = true;
    k = std::move(r);
  }
  for (auto& [d, v] : out.env) {
    ExprPtr r = substitute_param(v, name, with);
    if (r != v) changed = true;
    v = std::move(r);
  }
  return changed ? make(std::move(out)) : e;
}

// ---------------------------------------------------------------------------
// simplification

namespace {

Rational rat_pow(const Rational& b, long e) {
  Rational r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

ExprPtr simp(const ExprPtr& e);

std::vector<ExprPtr> simp_kids(const ExprPtr& e) {
  std::vector<ExprPtr> v;
  v.reserve(e->kids.size());
  for (const ExprPtr& k : e->kids) v.push_back(simp(k));
  return v;
}

ExprPtr simp_leaf_env(const ExprPtr& e) {
  Expr out = *e;
  bool changed = false;
  for (auto& [d, v] : out.env) {
    ExprPtr r = simp(v);
    if (r != v) changed = true;
    v = std::move(r);
  }
  return changed ? std::make_shared<const Expr>(std::move(out)) : e;
}

// Truncate sum_{v=0}^{N} C(N,v)*[v < K]*rest(v) to the first K terms; sound
// because the binomial factor kills the terms beyond N when K - 1 > N.
ExprPtr truncate_sum(const std::string& var, const ExprPtr& upper,
                     const std::vector<ExprPtr>& factors) {
  long K = -1;
  size_t iv = factors.size(), ib = factors.size();
  for (size_t i = 0; i < factors.size(); ++i) {
    const ExprPtr& f = factors[i];
    if (f->kind == Expr::Lt && f->kids[0]->kind == Expr::Param &&
        f->kids[0]->name == var) {
      long k;
      if (const_long(f->kids[1], k) && k >= 0 && k <= 4) {
        K = k;
        iv = i;
      }
    }
    if (f->kind == Expr::Binom && f->kids[1]->kind == Expr::Param &&
        f->kids[1]->name == var && expr_equal(f->kids[0], upper))
      ib = i;
  }
  if (iv == factors.size() || ib == factors.size()) return nullptr;
  std::vector<ExprPtr> terms;
  for (long v = 0; v < K; ++v) {
    std::vector<ExprPtr> fs;
    for (size_t i = 0; i < factors.size(); ++i)
      if (i != iv) fs.push_back(factors[i]);
    terms.push_back(simp(substitute_param(mul(std::move(fs)), var, num(v))));
  }
  return simp(add(std::move(terms)));
}

ExprPtr simp(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Const:
    case Expr::Param:
      return e;
    case Expr::Add: {
      std::vector<ExprPtr> out;
      Rational c = 0;
      for (ExprPtr& k : simp_kids(e)) {
        if (k->kind == Expr::Add) {
          for (const ExprPtr& g : k->kids) {
            if (g->kind == Expr::Const) c += g->value;
            else out.push_back(g);
          }
        } else if (k->kind == Expr::Const) {
          c += k->value;
        } else {
          out.push_back(std::move(k));
        }
      }
      if (c != 0 || out.empty()) out.push_back(num(c));
      return add(std::move(out));
    }
    case Expr::Sub: {
      ExprPtr a = simp(e->kids[0]), b = simp(e->kids[1]);
      if (is_const(b, 0)) return a;
      if (a->kind == Expr::Const && b->kind == Expr::Const)
        return num(Rational(a->value - b->value));
      // (x + c1) - c2 folds into the additive constant
      if (b->kind == Expr::Const && a->kind == Expr::Add &&
          a->kids.back()->kind == Expr::Const) {
        std::vector<ExprPtr> ks(a->kids.begin(), a->kids.end() - 1);
        ks.push_back(num(Rational(a->kids.back()->value - b->value)));
        return simp(add(std::move(ks)));
      }
      return sub(std::move(a), std::move(b));
    }
    case Expr::Mul: {
      std::vector<ExprPtr> out;
      Rational c = 1;
      for (ExprPtr& k : simp_kids(e)) {
        if (k->kind == Expr::Mul) {
          for (const ExprPtr& g : k->kids) {
            if (g->kind == Expr::Const) c *= g->value;
            else out.push_back(g);
          }
        } else if (k->kind == Expr::Const) {
          c *= k->value;
        } else {
          out.push_back(std::move(k));
        }
      }
      if (c == 0) return num(0);
      // calls and sums last so short-circuit evaluation sees guards first
      std::stable_partition(out.begin(), out.end(), [](const ExprPtr& f) {
        return f->kind != Expr::Call && f->kind != Expr::Sum;
      });
      if (c != 1 || out.empty()) out.insert(out.begin(), num(c));
      return mul(std::move(out));
    }
    case Expr::Pow: {
      ExprPtr b = simp(e->kids[0]), x = simp(e->kids[1]);
      if (is_const(x, 0)) return num(1);
      if (is_const(x, 1)) return b;
      if (is_const(b, 1)) return num(1);
      if (is_const(b, 0)) return simp(eq(std::move(x), num(0)));
      long xe;
      if (b->kind == Expr::Const && const_long(x, xe) && xe >= 0 && xe <= 256)
        return num(rat_pow(b->value, xe));
      return pow_expr(std::move(b), std::move(x));
    }
    case Expr::Binom: {
      ExprPtr n = simp(e->kids[0]), k = simp(e->kids[1]);
      if (is_const(k, 0)) return num(1);
      if (is_const(k, 1)) return n;
      long nc, kc;
      if (const_long(n, nc) && const_long(k, kc) && nc >= 0) {
        if (kc < 0 || kc > nc) return num(0);
        Integer r;
        mpz_bin_uiui(r.get_mpz_t(), nc, kc);
        return num(Rational(r));
      }
      return binom(std::move(n), std::move(k));
    }
    case Expr::Lt: {
      ExprPtr a = simp(e->kids[0]), b = simp(e->kids[1]);
      if (a->kind == Expr::Const && b->kind == Expr::Const)
        return num(a->value < b->value ? 1 : 0);
      return lt(std::move(a), std::move(b));
    }
    case Expr::Eq: {
      ExprPtr a = simp(e->kids[0]), b = simp(e->kids[1]);
      if (a->kind == Expr::Const && b->kind == Expr::Const)
        return num(a->value == b->value ? 1 : 0);
      return eq(std::move(a), std::move(b));
    }
    case Expr::Sum: {
      ExprPtr upper = simp(e->kids[0]);
      ExprPtr body = simp(e->kids[1]);
      std::vector<ExprPtr> factors =
          body->kind == Expr::Mul ? body->kids : std::vector<ExprPtr>{body};
      if (ExprPtr t = truncate_sum(e->name, upper, factors)) return t;
      return sum_expr(e->name, std::move(upper), std::move(body));
    }
    case Expr::Count:
      if (e->clause.vacuous()) return num(0);
      if (e->clause.num_vars() == 0) return num(1);  // a single ground atom
      return simp_leaf_env(e);
    case Expr::Oracle:
      return simp_leaf_env(e);
    case Expr::Call: {
      Expr out = *e;
      out.kids = simp_kids(e);
      return std::make_shared<const Expr>(std::move(out));
    }
  }
  throw std::logic_error("unhandled expression kind");
}

}  // namespace

ExprPtr simplify(const ExprPtr& e) {
  ExprPtr cur = e;
  for (int i = 0; i < 6; ++i) {
    ExprPtr next = simp(cur);
    if (expr_equal(next, cur)) break;
    cur = std::move(next);
  }
  return cur;
}

std::vector<FunctionDef> simplify(std::vector<FunctionDef> defs) {
  for (FunctionDef& d : defs) d.body = simplify(d.body);
  return defs;
}

// ---------------------------------------------------------------------------
// rendering

namespace {

// precedence levels: 1 additive, 2 multiplicative, 3 power, 4 atomic
int level(const Expr& e) {
  switch (e.kind) {
    case Expr::Add:
    case Expr::Sub:
    case Expr::Sum:
      return 1;
    case Expr::Mul:
      return 2;
    case Expr::Pow:
      return 3;
    case Expr::Const:
      return (e.value < 0 || e.value.get_den() != 1) ? 1 : 4;
    default:
      return 4;
  }
}

void render(const Session& sn, const ExprPtr& e, int min_level,
            std::ostringstream& os) {
  bool parens = level(*e) < min_level;
  if (parens) os << "(";
  switch (e->kind) {
    case Expr::Const:
      os << e->value.get_str();
      break;
    case Expr::Param:
      os << e->name;
      break;
    case Expr::Add:
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << " + ";
        render(sn, e->kids[i], 1, os);
      }
      break;
    case Expr::Sub:
      render(sn, e->kids[0], 1, os);
      os << " - ";
      render(sn, e->kids[1], 2, os);
      break;
    case Expr::Mul:
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << "*";
        render(sn, e->kids[i], 2, os);
      }
      break;
    case Expr::Pow:
      render(sn, e->kids[0], 4, os);
      os << "^";
      render(sn, e->kids[1], 4, os);
      break;
    case Expr::Sum:
      os << "sum_{" << e->name << "=0}^{";
      render(sn, e->kids[0], 1, os);
      os << "} ";
      render(sn, e->kids[1], 2, os);
      break;
    case Expr::Binom:
      os << "C(";
      render(sn, e->kids[0], 1, os);
      os << ", ";
      render(sn, e->kids[1], 1, os);
      os << ")";
      break;
    case Expr::Lt:
    case Expr::Eq:
      os << "[";
      render(sn, e->kids[0], 1, os);
      os << (e->kind == Expr::Lt ? " < " : " = ");
      render(sn, e->kids[1], 1, os);
      os << "]";
      break;
    case Expr::Count:
    case Expr::Oracle: {
      os << (e->kind == Expr::Count ? "count(" : "oracle(");
      os << (e->kind == Expr::Count ? to_string(sn, e->clause)
                                    : to_string(sn, e->formula));
      for (const auto& [d, v] : e->env) {
        os << "; " << sn.domain(d).name << "=";
        render(sn, v, 1, os);
      }
      os << ")";
      break;
    }
    case Expr::Call:
      os << e->name << "(";
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << ", ";
        render(sn, e->kids[i], 1, os);
      }
      os << ")";
      break;
  }
  if (parens) os << ")";
}

}  // namespace

std::string to_string(const Session& sn, const ExprPtr& e) {
  std::ostringstream os;
  render(sn, e, 0, os);
  return os.str();
}

std::string to_string(const Session& sn, const FunctionDef& def) {
  std::ostringstream os;
  os << def.name << "(";
  for (size_t i = 0; i < def.params.size(); ++i) {
    if (i) os << ", ";
    os << def.params[i];
  }
  os << ") = ";
  render(sn, def.body, 0, os);
  return os.str();
}

std::string to_string(const Session& sn,
                      const std::vector<FunctionDef>& defs) {
  std::string out;
  for (const FunctionDef& d : defs) {
    out += to_string(sn, d);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// scope checking

namespace {

void check_expr(const ExprPtr& e, std::set<std::string> bound,
                const std::set<std::string>& fns) {
  switch (e->kind) {
    case Expr::Param:
      if (!bound.count(e->name))
        throw std::logic_error("unbound parameter " + e->name);
      return;
    case Expr::Sum:
      check_expr(e->kids[0], bound, fns);
      bound.insert(e->name);
      check_expr(e->kids[1], bound, fns);
      return;
    case Expr::Call:
      if (!fns.count(e->name))
        throw std::logic_error("call to unknown function " + e->name);
      break;
    default:
      break;
  }
  for (const ExprPtr& k : e->kids) check_expr(k, bound, fns);
  for (const auto& [d, v] : e->env) check_expr(v, bound, fns);
}

}  // namespace

void scope_check(const std::vector<FunctionDef>& defs) {
  std::set<std::string> fns;
  for (const FunctionDef& d : defs) fns.insert(d.name);
  for (const FunctionDef& d : defs) {
    if (d.params.size() != d.doms.size())
      throw std::logic_error("parameter/domain arity mismatch in " + d.name);
    std::set<std::string> bound(d.params.begin(), d.params.end());
    check_expr(d.body, std::move(bound), fns);
  }
}

}  // namespace liftcount
