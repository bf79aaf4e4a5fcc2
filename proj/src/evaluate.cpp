#include "liftcount/evaluate.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "liftcount/grounding.hpp"

namespace liftcount {

namespace {

using Bindings = std::map<std::string, long>;

struct Evaluator {
  const Session& sn;
  const std::vector<FunctionDef>& defs;
  const EvalOptions& opts;
  std::map<std::string, size_t> by_name;
  std::map<std::pair<size_t, std::vector<long>>, Rational> memo;
  std::set<std::pair<size_t, std::vector<long>>> active;
  std::vector<std::vector<Integer>> pascal;
  EvalStats stats;

  Evaluator(const Session& s, const std::vector<FunctionDef>& d,
            const EvalOptions& o)
      : sn(s), defs(d), opts(o) {
    for (size_t i = 0; i < defs.size(); ++i) by_name[defs[i].name] = i;
  }

  Integer binom_at(long n, long k) {
    if (k < 0 || k > n) return 0;
    Integer r;
    if (n > 4096) {  // skip the table for huge rows
      mpz_bin_uiui(r.get_mpz_t(), n, k);
      return r;
    }
    while (static_cast<long>(pascal.size()) <= n) {
      long i = static_cast<long>(pascal.size());
      std::vector<Integer> row(i + 1, 1);
      for (long j = 1; j < i; ++j)
        row[j] = pascal[i - 1][j - 1] + pascal[i - 1][j];
      pascal.push_back(std::move(row));
    }
    return pascal[n][k];
  }

  long eval_long(const ExprPtr& e, const Bindings& bind) {
    Rational v = eval(e, bind);
    if (v.get_den() != 1 || !v.get_num().fits_slong_p())
      throw std::runtime_error("expected a small integer, got " + v.get_str());
    return v.get_num().get_si();
  }

  DomainSizeAssignment env_sizes(const std::map<DomainId, ExprPtr>& env,
                                 const Bindings& bind) {
    DomainSizeAssignment s;
    for (const auto& [d, ex] : env) {
      long v = eval_long(ex, bind);
      if (v < 0)
        throw std::runtime_error("negative size for domain " +
                                 sn.domain(d).name);
      s[d] = v;
    }
    return s;
  }

  Rational call_fn(size_t i, std::vector<long> args) {
    const FunctionDef& d = defs[i];
    if (args.size() != d.params.size())
      throw std::logic_error("arity mismatch calling " + d.name);
    for (long a : args)
      if (a < 0)
        throw std::runtime_error("negative argument in call to " + d.name);
    auto key = std::make_pair(i, std::move(args));
    if (opts.memo) {
      if (auto it = memo.find(key); it != memo.end()) {
        ++stats.hits;
        return it->second;
      }
    }
    ++stats.misses;
    bool base = false;
    for (int gi : d.guard_params)
      if (key.second[gi] == 0) base = true;
    Rational r;
    if (base) {
      DomainSizeAssignment s;
      for (size_t j = 0; j < d.doms.size(); ++j) s[d.doms[j]] = key.second[j];
      r = oracle_count_pattern(sn, d.formula, s, opts.oracle);
    } else {
      if (!active.insert(key).second)
        throw std::runtime_error("recursive call does not shrink: " + d.name);
      Bindings bind;
      for (size_t j = 0; j < d.params.size(); ++j)
        bind[d.params[j]] = key.second[j];
      r = eval(d.body, bind);
      active.erase(key);
    }
    if (opts.memo) {
      memo.emplace(std::move(key), r);
      stats.entries = static_cast<long>(memo.size());
    }
    return r;
  }

  Rational eval(const ExprPtr& e, const Bindings& bind) {
    switch (e->kind) {
      case Expr::Const:
        return e->value;
      case Expr::Param: {
        auto it = bind.find(e->name);
        if (it == bind.end())
          throw std::logic_error("unbound parameter " + e->name);
        return it->second;
      }
      case Expr::Add: {
        Rational r = 0;
        for (const ExprPtr& k : e->kids) r += eval(k, bind);
        return r;
      }
      case Expr::Sub:
        return eval(e->kids[0], bind) - eval(e->kids[1], bind);
      case Expr::Mul: {
        // Left to right with short-circuit: guard factors precede the
        // subexpressions they protect.
        Rational r = 1;
        for (const ExprPtr& k : e->kids) {
          r *= eval(k, bind);
          if (r == 0) return r;
        }
        return r;
      }
      case Expr::Pow: {
        long x = eval_long(e->kids[1], bind);
        if (x == 0) return 1;  // exponent first: 0 avoids the base entirely
        if (x < 0) throw std::runtime_error("negative exponent");
        Rational b = eval(e->kids[0], bind);
        Integer num, den;
        mpz_pow_ui(num.get_mpz_t(), b.get_num().get_mpz_t(), x);
        mpz_pow_ui(den.get_mpz_t(), b.get_den().get_mpz_t(), x);
        Rational r(num, den);
        r.canonicalize();
        return r;
      }
      case Expr::Sum: {
        long upper = eval_long(e->kids[0], bind);
        if (upper < 0) throw std::runtime_error("negative sum bound");
        Rational r = 0;
        Bindings inner = bind;
        for (long l = 0; l <= upper; ++l) {
          inner[e->name] = l;
          r += eval(e->kids[1], inner);
        }
        return r;
      }
      case Expr::Binom: {
        long n = eval_long(e->kids[0], bind);
        long k = eval_long(e->kids[1], bind);
        if (n < 0) throw std::runtime_error("negative binomial row");
        return Rational(binom_at(n, k));
      }
      case Expr::Lt:
        return eval(e->kids[0], bind) < eval(e->kids[1], bind) ? 1 : 0;
      case Expr::Eq:
        return eval(e->kids[0], bind) == eval(e->kids[1], bind) ? 1 : 0;
      case Expr::Count:
        return grounding_count(sn, e->clause, env_sizes(e->env, bind));
      case Expr::Oracle:
        return oracle_count_pattern(sn, e->formula, env_sizes(e->env, bind),
                                    opts.oracle);
      case Expr::Call: {
        std::vector<long> args;
        args.reserve(e->kids.size());
        for (const ExprPtr& k : e->kids) args.push_back(eval_long(k, bind));
        return call_fn(by_name.at(e->name), std::move(args));
      }
    }
    throw std::logic_error("unhandled expression kind");
  }
};

}  // namespace

Rational evaluate(const Session& sn, const std::vector<FunctionDef>& defs,
                  const DomainSizeAssignment& sizes, EvalStats* stats,
                  const EvalOptions& opts) {
  if (defs.empty()) throw std::invalid_argument("no function definitions");
  Evaluator ev(sn, defs, opts);
  std::vector<long> args;
  for (DomainId d : defs.front().doms) {
    auto it = sizes.find(d);
    if (it == sizes.end())
      throw std::invalid_argument("missing size for domain " +
                                  sn.domain(d).name);
    args.push_back(it->second);
  }
  Rational r = ev.call_fn(0, std::move(args));
  if (stats) *stats = ev.stats;
  return r;
}

}  // namespace liftcount
