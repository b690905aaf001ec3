// Copyright 2026 The CondSafe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "condsafe/frontend.h"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "condsafe/errors.h"

namespace condsafe {
namespace {

enum class Tok {
  kIdent,
  kInt,
  kSemi,
  kColon,
  kArrow,
  kLBrace,
  kRBrace,
  kComma,
  kPrime,
  kPlus,
  kMinus,
  kStar,
  kLe,
  kLt,
  kGe,
  kGt,
  kEq,
  kNe,
  kOrOr,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::kIdent, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        ++j;
      }
      out.push_back({Tok::kInt, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    auto two = text.substr(i, 2);
    struct Sym {
      std::string_view s;
      Tok t;
    };
    static constexpr Sym kSymbols[] = {
        {"->", Tok::kArrow}, {"<=", Tok::kLe}, {">=", Tok::kGe},
        {"!=", Tok::kNe},    {"||", Tok::kOrOr}, {";", Tok::kSemi},
        {":", Tok::kColon},  {"{", Tok::kLBrace}, {"}", Tok::kRBrace},
        {",", Tok::kComma},  {"'", Tok::kPrime}, {"+", Tok::kPlus},
        {"-", Tok::kMinus},  {"*", Tok::kStar},  {"<", Tok::kLt},
        {">", Tok::kGt},     {"=", Tok::kEq},
    };
    bool matched = false;
    for (const auto& sym : kSymbols) {
      if ((sym.s.size() == 2 && two == sym.s) ||
          (sym.s.size() == 1 && c == sym.s[0])) {
        out.push_back({sym.t, std::string(sym.s), tl, tc});
        advance(sym.s.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ParseError(tl, tc, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::kEnd, "<end of input>", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  ParsedProgram parse() {
    ParsedProgram out;
    Program& p = out.program;

    expect_keyword("var");
    parse_var_list(p);
    while (is_keyword("var")) {
      next();
      parse_var_list(p);
    }
    expect_keyword("init");
    p.init = expect(Tok::kIdent, "location name").text;
    add_location(p, p.init);
    expect(Tok::kSemi, "';'");

    while (peek().kind == Tok::kIdent && !is_keyword("assert")) {
      parse_transition(p);
    }
    while (is_keyword("assert")) {
      out.assertions.push_back(parse_assert(p));
    }
    if (peek().kind != Tok::kEnd) fail(peek(), "expected transition or assert");
    return out;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    throw ParseError(t.line, t.column, what + " (found '" + t.text + "')");
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(peek(), "expected " + what);
    return next();
  }

  bool is_keyword(std::string_view kw) const {
    return peek().kind == Tok::kIdent && peek().text == kw;
  }

  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail(peek(), "expected '" + std::string(kw) + "'");
    next();
  }

  static bool is_reserved(const std::string& s) {
    return s == "var" || s == "init" || s == "assert";
  }

  void parse_var_list(Program& p) {
    if (peek().kind != Tok::kIdent) fail(peek(), "expected variable name");
    while (peek().kind == Tok::kIdent) {
      const Token& t = next();
      if (is_reserved(t.text)) fail(t, "reserved word used as variable");
      if (declared_.count(t.text)) fail(t, "variable declared twice");
      declared_.insert(t.text);
      p.vars.push_back(t.text);
    }
    expect(Tok::kSemi, "';'");
  }

  static void add_location(Program& p, const Location& l) {
    if (!p.has_location(l)) p.locations.push_back(l);
  }

  void parse_transition(Program& p) {
    const Token& id = next();
    if (is_reserved(id.text)) fail(id, "reserved word used as transition id");
    if (p.find_transition(id.text) != nullptr) {
      fail(id, "duplicate transition id '" + id.text + "'");
    }
    expect(Tok::kColon, "':'");
    Transition t;
    t.id = id.text;
    t.origin = id.text;
    t.src = expect(Tok::kIdent, "source location").text;
    expect(Tok::kArrow, "'->'");
    t.dst = expect(Tok::kIdent, "target location").text;
    expect(Tok::kLBrace, "'{'");
    while (true) {
      const Token& start = peek();
      RawRelation raw = parse_constr(/*allow_primed=*/true);
      if (raw.op == RelOp::kNe) {
        throw DisequalityNotAllowedHere(
            std::to_string(start.line) + ":" + std::to_string(start.column) +
            ": '!=' is not allowed in a transition relation; split the "
            "transition instead");
      }
      for (auto& c : normalize_constraint(raw)) {
        if (!c.is_trivially_true()) t.relation.push_back(std::move(c));
      }
      if (peek().kind == Tok::kComma) {
        next();
        continue;
      }
      break;
    }
    expect(Tok::kRBrace, "'}'");
    expect(Tok::kSemi, "';'");
    add_location(p, t.src);
    add_location(p, t.dst);
    p.transitions.push_back(std::move(t));
  }

  AssertionSpec parse_assert(const Program& p) {
    const Token& kw = next();
    AssertionSpec spec;
    spec.line = kw.line;
    const Token& target = expect(Tok::kIdent, "transition or location name");
    spec.target = target.text;
    bool is_transition = p.find_transition(target.text) != nullptr;
    bool is_location = p.has_location(target.text);
    if (is_transition && is_location) {
      fail(target, "ambiguous assertion target");
    } else if (is_transition) {
      spec.target_kind = AssertionSpec::Target::kTransition;
    } else if (is_location) {
      spec.target_kind = AssertionSpec::Target::kLocation;
    } else {
      fail(target, "unknown transition or location '" + target.text + "'");
    }
    expect(Tok::kColon, "':'");

    // Each literal is itself a CNF; distribute the disjunction over them.
    std::vector<Clause> cnf = {Clause{}};
    while (true) {
      RawRelation raw = parse_constr(/*allow_primed=*/false);
      std::vector<Clause> lit_cnf = normalize_assertion_literal(raw);
      std::vector<Clause> product;
      for (const auto& a : cnf) {
        for (const auto& b : lit_cnf) {
          Clause c = a;
          c.literals.insert(c.literals.end(), b.literals.begin(),
                            b.literals.end());
          product.push_back(std::move(c));
        }
      }
      cnf = std::move(product);
      if (peek().kind == Tok::kOrOr) {
        next();
        continue;
      }
      break;
    }
    expect(Tok::kSemi, "';'");
    for (auto& c : cnf) spec.clauses.push_back(c.canonical());
    return spec;
  }

  RawRelation parse_constr(bool allow_primed) {
    RawRelation r;
    r.lhs = parse_linexp(allow_primed);
    const Token& op = next();
    switch (op.kind) {
      case Tok::kLe: r.op = RelOp::kLe; break;
      case Tok::kLt: r.op = RelOp::kLt; break;
      case Tok::kGe: r.op = RelOp::kGe; break;
      case Tok::kGt: r.op = RelOp::kGt; break;
      case Tok::kEq: r.op = RelOp::kEq; break;
      case Tok::kNe: r.op = RelOp::kNe; break;
      default: fail(op, "expected relation (<=, <, >=, >, =, !=)");
    }
    r.rhs = parse_linexp(allow_primed);
    return r;
  }

  LinearExpr parse_linexp(bool allow_primed) {
    LinearExpr e;
    Integer sign = 1;
    if (peek().kind == Tok::kMinus) {
      next();
      sign = -1;
    }
    e = e + parse_term(allow_primed) * sign;
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      sign = next().kind == Tok::kPlus ? 1 : -1;
      e = e + parse_term(allow_primed) * sign;
    }
    return e;
  }

  LinearExpr parse_term(bool allow_primed) {
    Integer coeff = 1;
    if (peek().kind == Tok::kInt) {
      coeff = Integer(next().text);
      if (peek().kind != Tok::kStar) return LinearExpr(coeff);
      next();
      if (peek().kind != Tok::kIdent) {
        fail(peek(), "expected variable after '*'");
      }
    }
    const Token& name = expect(Tok::kIdent, "variable or integer");
    if (!declared_.count(name.text)) {
      fail(name, "undeclared variable '" + name.text + "'");
    }
    bool primed = false;
    if (peek().kind == Tok::kPrime) {
      const Token& prime = next();
      if (!allow_primed) fail(prime, "primed variable not allowed in assertion");
      primed = true;
    }
    if (peek().kind == Tok::kStar) {
      fail(peek(), "nonlinear expression: product of variables");
    }
    return LinearExpr::variable(Var{name.text, primed}, coeff);
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  std::set<std::string> declared_;
};

std::string fresh_name(const std::string& base,
                       const std::function<bool(const std::string&)>& taken) {
  if (!taken(base)) return base;
  for (int i = 1;; ++i) {
    std::string candidate = base + std::to_string(i);
    if (!taken(candidate)) return candidate;
  }
}

}  // namespace

ParsedProgram parse_program(std::string_view text) {
  return Parser(text).parse();
}

ParsedProgram parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_program(buffer.str());
}

std::string print_program(const Program& program) {
  std::ostringstream os;
  os << "var";
  for (const auto& v : program.vars) os << ' ' << v;
  os << ";\ninit " << program.init << ";\n";
  for (const auto& t : program.transitions) {
    os << t.id << ": " << t.src << " -> " << t.dst << " { ";
    if (t.relation.empty()) {
      os << "0 <= 0";
    }
    for (size_t i = 0; i < t.relation.size(); ++i) {
      if (i > 0) os << ", ";
      os << t.relation[i].to_string();
    }
    os << " };\n";
  }
  return os.str();
}

DesugaredAssertion desugar_location_assertion(const Program& program,
                                              const Location& location,
                                              const Clause& formula) {
  if (!program.has_location(location)) {
    throw UnknownLocation("unknown location '" + location + "'");
  }
  DesugaredAssertion out{program, {}};
  Program& p = out.program;
  Location star = fresh_name(location + "_assert", [&](const std::string& s) {
    return p.has_location(s);
  });
  std::string tid = fresh_name(location + "_check", [&](const std::string& s) {
    return p.find_transition(s) != nullptr || p.has_location(s);
  });
  Transition t;
  t.id = tid;
  t.origin = tid;
  t.src = location;
  t.dst = star;
  for (const auto& v : p.vars) {
    LinearExpr diff = LinearExpr::variable(Var{v, true}) -
                      LinearExpr::variable(Var{v, false});
    t.relation.push_back(LinearConstraint(diff));
    t.relation.push_back(LinearConstraint(diff * Integer(-1)));
  }
  p.locations.push_back(star);
  p.transitions.push_back(std::move(t));
  out.assertion = Assertion{tid, tid, formula.canonical()};
  return out;
}

Instance elaborate(const ParsedProgram& parsed) {
  Instance out{parsed.program, {}};
  std::map<std::string, int> clauses_per_target;
  for (const auto& spec : parsed.assertions) {
    clauses_per_target[spec.target] += static_cast<int>(spec.clauses.size());
  }
  std::map<std::string, int> counter;
  for (const auto& spec : parsed.assertions) {
    std::string transition = spec.target;
    if (spec.target_kind == AssertionSpec::Target::kLocation) {
      DesugaredAssertion d =
          desugar_location_assertion(out.program, spec.target, Clause{});
      out.program = std::move(d.program);
      transition = d.assertion.transition;
    }
    for (const auto& clause : spec.clauses) {
      int n = ++counter[spec.target];
      std::string id = clauses_per_target[spec.target] == 1
                           ? spec.target
                           : spec.target + "#" + std::to_string(n);
      out.assertions.push_back(Assertion{id, transition, clause.canonical()});
    }
  }
  return out;
}

}  // namespace condsafe
