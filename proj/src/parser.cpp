#include <cctype>

#include "liftcount/frontend.hpp"

namespace liftcount {

namespace {

enum class Tok {
  End, Newline, Ident, Int,
  LParen, RParen, Comma, Colon,
  Eq, Neq, Not, And, Or, Arrow, Iff, Minus, Slash
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
        ++col_;
        continue;
      }
      break;
    }
    int line = line_, col = col_;
    auto emit = [&](Tok k, std::string text, size_t len) {
      tok_ = {k, std::move(text), line, col};
      pos_ += len;
      col_ += static_cast<int>(len);
    };
    if (pos_ >= s_.size()) {
      tok_ = {Tok::End, "", line, col};
      return;
    }
    char c = s_[pos_];
    if (c == '\n') {
      tok_ = {Tok::Newline, "\n", line, col};
      ++pos_;
      ++line_;
      col_ = 1;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t e = pos_;
      while (e < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[e])) || s_[e] == '_'))
        ++e;
      emit(Tok::Ident, s_.substr(pos_, e - pos_), e - pos_);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t e = pos_;
      while (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e])))
        ++e;
      emit(Tok::Int, s_.substr(pos_, e - pos_), e - pos_);
      return;
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < s_.size() && s_[pos_ + 1] == b;
    };
    if (two('<', '-') && pos_ + 2 < s_.size() && s_[pos_ + 2] == '>')
      return emit(Tok::Iff, "<->", 3);
    if (two('-', '>')) return emit(Tok::Arrow, "->", 2);
    if (two('!', '=')) return emit(Tok::Neq, "!=", 2);
    switch (c) {
      case '(': return emit(Tok::LParen, "(", 1);
      case ')': return emit(Tok::RParen, ")", 1);
      case ',': return emit(Tok::Comma, ",", 1);
      case ':': return emit(Tok::Colon, ":", 1);
      case '=': return emit(Tok::Eq, "=", 1);
      case '~': return emit(Tok::Not, "~", 1);
      case '&': return emit(Tok::And, "&", 1);
      case '|': return emit(Tok::Or, "|", 1);
      case '-': return emit(Tok::Minus, "-", 1);
      case '/': return emit(Tok::Slash, "/", 1);
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", line,
                     col);
  }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lx_(text) {}

  ProblemFile run() {
    ProblemFile pf;
    for (;;) {
      while (lx_.peek().kind == Tok::Newline) lx_.take();
      if (lx_.peek().kind == Tok::End) break;
      const Token& t = lx_.peek();
      if (t.kind == Tok::Ident && t.text == "domain") {
        lx_.take();
        pf.domains.push_back(expect_ident("domain name").text);
        end_of_line();
      } else if (t.kind == Tok::Ident && t.text == "predicate") {
        lx_.take();
        pf.preds.push_back(pred_decl());
      } else {
        pf.sentences.push_back(sentence());
      }
    }
    return pf;
  }

 private:
  Token expect(Tok k, const char* what) {
    if (lx_.peek().kind != k)
      throw ParseError(std::string("expected ") + what + ", got '" +
                           lx_.peek().text + "'",
                       lx_.peek().line, lx_.peek().col);
    return lx_.take();
  }
  Token expect_ident(const char* what) { return expect(Tok::Ident, what); }
  void end_of_line() {
    if (lx_.peek().kind == Tok::End) return;
    expect(Tok::Newline, "end of line");
  }

  Rational rational() {
    bool neg = false;
    if (lx_.peek().kind == Tok::Minus) {
      lx_.take();
      neg = true;
    }
    std::string num = expect(Tok::Int, "number").text;
    if (lx_.peek().kind == Tok::Slash) {
      lx_.take();
      num += "/" + expect(Tok::Int, "denominator").text;
    }
    Rational r(num);
    r.canonicalize();
    return neg ? Rational(-r) : r;
  }

  PredDecl pred_decl() {
    PredDecl d;
    Token name = expect_ident("predicate name");
    d.name = name.text;
    d.line = name.line;
    expect(Tok::LParen, "'('");
    if (lx_.peek().kind != Tok::RParen) {
      d.domains.push_back(expect_ident("domain name").text);
      while (lx_.peek().kind == Tok::Comma) {
        lx_.take();
        d.domains.push_back(expect_ident("domain name").text);
      }
    }
    expect(Tok::RParen, "')'");
    if (lx_.peek().kind == Tok::Ident && lx_.peek().text == "weight") {
      lx_.take();
      d.weight_true = rational();
      d.weight_false = rational();
    }
    end_of_line();
    return d;
  }

  Sentence sentence() {
    Sentence s;
    while (lx_.peek().kind == Tok::Ident &&
           (lx_.peek().text == "forall" || lx_.peek().text == "exists")) {
      Token q = lx_.take();
      bool universal = q.text == "forall";
      std::vector<std::string> pending;
      std::vector<int> pending_lines, pending_cols;
      for (;;) {
        Token v = expect_ident("variable");
        if (!is_variable_name(v.text))
          throw ParseError("quantified variables start uppercase: '" + v.text +
                               "'",
                           v.line, v.col);
        pending.push_back(v.text);
        if (lx_.peek().kind == Tok::Comma) {
          lx_.take();
          continue;
        }
        if (lx_.peek().kind == Tok::Ident && lx_.peek().text == "in") {
          lx_.take();
          Token d = expect_ident("domain name");
          s.prefix.push_back(
              {universal, std::move(pending), d.text, q.line, q.col});
          pending.clear();
          if (lx_.peek().kind == Tok::Comma) {
            lx_.take();
            continue;
          }
          break;
        }
        throw ParseError("expected 'in <domain>' after variable list",
                         lx_.peek().line, lx_.peek().col);
      }
      expect(Tok::Colon, "':'");
    }
    s.body = iff();
    end_of_line();
    return s;
  }

  AstPtr mk(Ast::Kind k, int line, int col) {
    auto n = std::make_unique<Ast>();
    n->kind = k;
    n->line = line;
    n->col = col;
    return n;
  }

  AstPtr iff() {
    AstPtr a = implies();
    while (lx_.peek().kind == Tok::Iff) {
      Token t = lx_.take();
      AstPtr n = mk(Ast::Iff, t.line, t.col);
      n->kids.push_back(std::move(a));
      n->kids.push_back(implies());
      a = std::move(n);
    }
    return a;
  }

  AstPtr implies() {
    AstPtr a = disj();
    if (lx_.peek().kind == Tok::Arrow) {
      Token t = lx_.take();
      AstPtr n = mk(Ast::Implies, t.line, t.col);
      n->kids.push_back(std::move(a));
      n->kids.push_back(implies());
      return n;
    }
    return a;
  }

  AstPtr disj() {
    AstPtr a = conj();
    while (lx_.peek().kind == Tok::Or) {
      Token t = lx_.take();
      AstPtr n = mk(Ast::Or, t.line, t.col);
      n->kids.push_back(std::move(a));
      n->kids.push_back(conj());
      a = std::move(n);
    }
    return a;
  }

  AstPtr conj() {
    AstPtr a = unary();
    while (lx_.peek().kind == Tok::And) {
      Token t = lx_.take();
      AstPtr n = mk(Ast::And, t.line, t.col);
      n->kids.push_back(std::move(a));
      n->kids.push_back(unary());
      a = std::move(n);
    }
    return a;
  }

  AstPtr unary() {
    if (lx_.peek().kind == Tok::Not) {
      Token t = lx_.take();
      AstPtr n = mk(Ast::Not, t.line, t.col);
      n->kids.push_back(unary());
      return n;
    }
    if (lx_.peek().kind == Tok::LParen) {
      lx_.take();
      AstPtr a = iff();
      expect(Tok::RParen, "')'");
      return a;
    }
    Token id = expect_ident("atom");
    if (lx_.peek().kind == Tok::LParen) {
      lx_.take();
      AstPtr n = mk(Ast::Atom, id.line, id.col);
      n->pred = id.text;
      if (lx_.peek().kind != Tok::RParen) {
        n->args.push_back(expect_ident("term").text);
        while (lx_.peek().kind == Tok::Comma) {
          lx_.take();
          n->args.push_back(expect_ident("term").text);
        }
      }
      expect(Tok::RParen, "')'");
      return n;
    }
    if (lx_.peek().kind == Tok::Eq || lx_.peek().kind == Tok::Neq) {
      bool neq = lx_.take().kind == Tok::Neq;
      Token rhs = expect_ident("term");
      AstPtr n = mk(Ast::Eq, id.line, id.col);
      n->args = {id.text, rhs.text};
      if (!neq) return n;
      AstPtr notn = mk(Ast::Not, id.line, id.col);
      notn->kids.push_back(std::move(n));
      return notn;
    }
    // Bare identifier: nullary predicate.
    AstPtr n = mk(Ast::Atom, id.line, id.col);
    n->pred = id.text;
    return n;
  }

  Lexer lx_;
};

}  // namespace

ProblemFile parse(const std::string& text) { return Parser(text).run(); }

}  // namespace liftcount
