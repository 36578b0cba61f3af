#include "stencil/problem.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "stencil/symbolic.hpp"

namespace stencil {

SpecError::SpecError(SourceLoc l, const std::string& m)
    : std::runtime_error("line " + std::to_string(l.line) + ", col " + std::to_string(l.col) + ": " + m),
      loc(l),
      message(m) {}

bool operator==(const SpecExpr& a, const SpecExpr& b) {
  return a.kind == b.kind && a.text == b.text && a.args == b.args;
}

namespace {

// ---- lexer -----------------------------------------------------------------------

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int col = 0;
};

std::vector<Token> lex(const std::string& line, int lineno) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    int col = static_cast<int>(i) + 1;
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      out.push_back({Tok::Ident, line.substr(i, j - i), col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      // A '.' followed by a letter is a suffix, not a fraction.
      if (j < line.size() && line[j] == '.' && !(j + 1 < line.size() && std::isalpha(static_cast<unsigned char>(line[j + 1])) &&
                                                line[j + 1] != 'e' && line[j + 1] != 'E')) {
        ++j;
        while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      }
      if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        size_t k = j + 1;
        if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
        if (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) {
          while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
          j = k;
        }
      }
      out.push_back({Tok::Number, line.substr(i, j - i), col});
      i = j;
      continue;
    }
    if (c == '*' && i + 1 < line.size() && line[i + 1] == '*') {
      out.push_back({Tok::Punct, "**", col});
      i += 2;
      continue;
    }
    if (std::string("()=,+-*/.").find(c) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, c), col});
      ++i;
      continue;
    }
    throw SpecError({lineno, col}, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

// ---- parser ----------------------------------------------------------------------

const std::set<std::string> kCalls1 = {"sin", "cos", "sqrt", "floor"};
const std::set<std::string> kCalls2 = {"min", "max", "solve"};

struct Scope {
  std::vector<std::string> dims;  // grid space dimensions
  std::map<std::string, std::string> functions;  // name -> kind
  std::set<std::string> scalars;
};

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int lineno, const std::string& raw, Scope& scope)
      : toks_(std::move(toks)), line_(lineno), raw_(raw), scope_(scope) {}

  void parse(ProblemSpec& spec);

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  SourceLoc loc(const Token& t) const { return {line_, t.col}; }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw SpecError(loc(t), msg); }
  bool accept(const std::string& punct) {
    if (peek().kind == Tok::Punct && peek().text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& punct) {
    if (!accept(punct))
      fail(peek(), "expected '" + punct + "' but found " + (peek().kind == Tok::End ? "end of line" : "'" + peek().text + "'"));
  }
  std::string ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail(peek(), "expected " + what);
    return next().text;
  }
  void end() {
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "'");
  }

  double number();
  int64_t integer(const std::string& key);
  std::vector<double> tuple();

  SpecExpr expr();
  SpecExpr term();
  SpecExpr unary();
  SpecExpr power();
  SpecExpr postfix();
  SpecExpr primary();
  void check_suffix(const Token& t, const std::string& s) const;

  void grid(ProblemSpec& spec);
  void function(ProblemSpec& spec, const std::string& kind);
  void equation(ProblemSpec& spec);
  void sparse_op(ProblemSpec& spec, const Token& name);
  void param(ProblemSpec& spec);
  void subs(ProblemSpec& spec);
  void init(ProblemSpec& spec);

  std::vector<Token> toks_;
  size_t pos_ = 0;
  int line_;
  const std::string& raw_;
  Scope& scope_;
};

double LineParser::number() {
  bool neg = accept("-");
  if (peek().kind != Tok::Number) fail(peek(), "expected a number");
  Token t = next();
  double v = std::strtod(t.text.c_str(), nullptr);
  return neg ? -v : v;
}

int64_t LineParser::integer(const std::string& key) {
  Token t = peek();
  if (t.kind != Tok::Number || t.text.find_first_of(".eE") != std::string::npos)
    fail(t, key + " expects an integer");
  ++pos_;
  return std::stoll(t.text);
}

std::vector<double> LineParser::tuple() {
  expect("(");
  std::vector<double> out;
  if (accept(")")) return out;
  do out.push_back(number());
  while (accept(","));
  expect(")");
  return out;
}

SpecExpr make(SpecExpr::Kind k, std::string text, std::vector<SpecExpr> args, SourceLoc loc) {
  SpecExpr e;
  e.kind = k;
  e.text = std::move(text);
  e.args = std::move(args);
  e.loc = loc;
  return e;
}

SpecExpr LineParser::expr() {
  SpecExpr lhs = term();
  while (peek().kind == Tok::Punct && (peek().text == "+" || peek().text == "-")) {
    Token op = next();
    SpecExpr rhs = term();
    lhs = make(op.text == "+" ? SpecExpr::Kind::Add : SpecExpr::Kind::Sub, "", {lhs, rhs}, loc(op));
  }
  return lhs;
}

SpecExpr LineParser::term() {
  SpecExpr lhs = unary();
  while (peek().kind == Tok::Punct && (peek().text == "*" || peek().text == "/")) {
    Token op = next();
    SpecExpr rhs = unary();
    lhs = make(op.text == "*" ? SpecExpr::Kind::Mul : SpecExpr::Kind::Div, "", {lhs, rhs}, loc(op));
  }
  return lhs;
}

SpecExpr LineParser::unary() {
  if (peek().kind == Tok::Punct && peek().text == "-") {
    Token op = next();
    return make(SpecExpr::Kind::Neg, "", {unary()}, loc(op));
  }
  return power();
}

SpecExpr LineParser::power() {
  SpecExpr base = postfix();
  if (peek().kind == Tok::Punct && peek().text == "**") {
    Token op = next();
    return make(SpecExpr::Kind::Pow, "", {base, unary()}, loc(op));
  }
  return base;
}

void LineParser::check_suffix(const Token& t, const std::string& s) const {
  static const std::set<std::string> fixed = {"laplace", "forward", "backward", "dt", "dt2"};
  if (fixed.count(s)) return;
  if (s.size() >= 2 && s[0] == 'd') {
    std::string d = s.substr(1);
    if (d.size() > 1 && d.back() == '2') d.pop_back();
    for (const auto& n : scope_.dims)
      if (n == d) return;
    fail(t, "unknown dimension " + d);
  }
  fail(t, "unknown suffix ." + s);
}

SpecExpr LineParser::postfix() {
  SpecExpr e = primary();
  while (peek().kind == Tok::Punct && peek().text == ".") {
    // inject/interpolate are statements, not suffixes.
    if (peek(1).kind == Tok::Ident && (peek(1).text == "inject" || peek(1).text == "interpolate")) break;
    next();
    Token s = peek();
    std::string name = ident("a suffix after '.'");
    check_suffix(s, name);
    e = make(SpecExpr::Kind::Suffix, name, {e}, loc(s));
  }
  return e;
}

SpecExpr LineParser::primary() {
  Token t = peek();
  if (t.kind == Tok::Number) {
    ++pos_;
    return make(SpecExpr::Kind::Number, t.text, {}, loc(t));
  }
  if (t.kind == Tok::Ident) {
    ++pos_;
    if (accept("(")) {
      std::vector<SpecExpr> args;
      if (!accept(")")) {
        do args.push_back(expr());
        while (accept(","));
        expect(")");
      }
      size_t want = kCalls1.count(t.text) ? 1 : kCalls2.count(t.text) ? 2 : 0;
      if (!want) fail(t, "unknown function '" + t.text + "'");
      if (args.size() != want)
        fail(t, t.text + "() takes " + std::to_string(want) + " argument" + (want > 1 ? "s" : "") + ", got " +
                    std::to_string(args.size()));
      return make(SpecExpr::Kind::Call, t.text, std::move(args), loc(t));
    }
    if (!scope_.functions.count(t.text) && !scope_.scalars.count(t.text))
      fail(t, "undeclared identifier '" + t.text + "'");
    return make(SpecExpr::Kind::Name, t.text, {}, loc(t));
  }
  if (accept("(")) {
    SpecExpr e = expr();
    expect(")");
    return e;
  }
  fail(t, t.kind == Tok::End ? "unexpected end of line" : "unexpected '" + t.text + "'");
}

void LineParser::grid(ProblemSpec& spec) {
  if (spec.grid.present) fail(peek(), "grid declared twice");
  spec.grid.present = true;
  spec.grid.loc = loc(toks_[0]);
  while (peek().kind != Tok::End) {
    Token key = peek();
    std::string k = ident("a grid option");
    expect("=");
    if (k == "shape") {
      for (double v : tuple()) {
        if (v != std::floor(v) || v < 2) fail(key, "shape entries must be integers >= 2");
        spec.grid.shape.push_back(static_cast<int64_t>(v));
      }
    } else if (k == "extent") {
      spec.grid.extent = tuple();
    } else if (k == "origin") {
      spec.grid.origin = tuple();
    } else {
      fail(key, "unknown grid option '" + k + "'");
    }
  }
  if (spec.grid.shape.empty() || spec.grid.shape.size() > 3) fail(toks_[0], "grid needs a shape of 1 to 3 entries");
  auto n = spec.grid.shape.size();
  if ((!spec.grid.extent.empty() && spec.grid.extent.size() != n) || (!spec.grid.origin.empty() && spec.grid.origin.size() != n))
    fail(toks_[0], "extent/origin rank does not match shape");
  static const char* names[] = {"x", "y", "z"};
  scope_.dims.clear();
  for (size_t i = 0; i < n; ++i) {
    scope_.dims.push_back(names[i]);
    scope_.scalars.insert(names[i]);
    scope_.scalars.insert(std::string("h_") + names[i]);
    scope_.scalars.insert(std::string("o_") + names[i]);
  }
  scope_.scalars.insert("t");
  scope_.scalars.insert("dt");
}

void LineParser::function(ProblemSpec& spec, const std::string& kind) {
  if (!spec.grid.present) fail(toks_[0], "grid must be declared before functions");
  FunctionSpec f;
  f.kind = kind;
  f.loc = loc(toks_[0]);
  Token name = peek();
  f.name = ident("a function name");
  if (scope_.functions.count(f.name) || scope_.scalars.count(f.name)) fail(name, "'" + f.name + "' is already declared");
  std::set<std::string> allowed;
  if (kind == "function") allowed = {"space_order", "padding"};
  if (kind == "timefunction") allowed = {"space_order", "time_order", "save", "factor", "padding"};
  if (kind == "sparsetimefunction") allowed = {"npoint", "nt", "coordinates"};
  while (peek().kind != Tok::End) {
    Token key = peek();
    std::string k = ident("an option");
    if (!allowed.count(k)) fail(key, "unknown option '" + k + "' for " + kind);
    expect("=");
    if (k == "coordinates") {
      expect("(");
      do f.coordinates.push_back(tuple());
      while (accept(","));
      expect(")");
      continue;
    }
    int64_t v = integer(k);
    if (v < 0) fail(key, k + " must be non-negative");
    int iv = static_cast<int>(v);
    if (k == "space_order") {
      if (iv < 2 || iv % 2) fail(key, "space_order must be even and >= 2");
      f.space_order = iv;
    } else if (k == "time_order") {
      if (iv < 1 || iv > 2) fail(key, "time_order must be 1 or 2");
      f.time_order = iv;
    } else if (k == "save") {
      f.save = iv;
    } else if (k == "factor") {
      f.factor = iv;
    } else if (k == "padding") {
      f.padding = iv;
    } else if (k == "npoint") {
      f.npoint = iv;
    } else if (k == "nt") {
      f.nt = iv;
    }
  }
  if (kind == "sparsetimefunction") {
    if (f.npoint < 1) fail(name, "sparse function '" + f.name + "' needs npoint >= 1");
    if (!f.coordinates.empty() && f.coordinates.size() != static_cast<size_t>(f.npoint))
      fail(name, "'" + f.name + "' expects " + std::to_string(f.npoint) + " coordinates");
    for (const auto& c : f.coordinates)
      if (c.size() != scope_.dims.size()) fail(name, "coordinate rank mismatch for '" + f.name + "'");
  }
  scope_.functions[f.name] = kind;
  spec.functions.push_back(f);
}

void LineParser::equation(ProblemSpec& spec) {
  if (peek().kind == Tok::Ident && peek(1).kind == Tok::Punct && peek(1).text == "." &&
      (peek(2).text == "inject" || peek(2).text == "interpolate")) {
    Token name = next();
    sparse_op(spec, name);
    return;
  }
  StatementSpec s;
  s.loc = loc(toks_[0]);
  Token lt = peek();
  s.lhs = postfix();
  const SpecExpr* base = &s.lhs;
  while (base->kind == SpecExpr::Kind::Suffix) {
    if (base->text != "forward" && base->text != "backward") fail(lt, "left-hand side must be a function access");
    base = &base->args[0];
  }
  if (base->kind != SpecExpr::Kind::Name || !scope_.functions.count(base->text))
    fail(lt, "left-hand side must be a function access");
  expect("=");
  s.rhs = expr();
  if (peek().kind == Tok::Ident && peek().text == "region") {
    next();
    expect("=");
    Token r = peek();
    std::string region = ident("a region");
    if (region == "interior")
      s.interior = true;
    else if (region != "domain")
      fail(r, "unknown region '" + region + "'");
  }
  end();
  spec.statements.push_back(s);
}

void LineParser::sparse_op(ProblemSpec& spec, const Token& name) {
  auto it = scope_.functions.find(name.text);
  if (it == scope_.functions.end()) fail(name, "undeclared identifier '" + name.text + "'");
  if (it->second != "sparsetimefunction") fail(name, "'" + name.text + "' is not a sparse function");
  expect(".");
  StatementSpec s;
  s.loc = loc(name);
  s.target = name.text;
  std::string op = next().text;
  expect("(");
  if (op == "inject") {
    s.kind = StatementSpec::Kind::Inject;
    Token k = peek();
    if (ident("field=") != "field") fail(k, "inject expects field=... first");
    expect("=");
    s.field = postfix();
    expect(",");
    k = peek();
    if (ident("expr=") != "expr") fail(k, "inject expects expr=... second");
    expect("=");
    s.expr = expr();
  } else {
    s.kind = StatementSpec::Kind::Interpolate;
    s.expr = expr();
  }
  expect(")");
  end();
  spec.statements.push_back(s);
}

void LineParser::param(ProblemSpec& spec) {
  Token key = peek();
  std::string k = ident("a parameter name");
  expect("=");
  if (peek().kind == Tok::End) fail(peek(), "missing value for '" + k + "'");
  std::string value = raw_.substr(static_cast<size_t>(peek().col - 1));
  if (auto hash = value.find('#'); hash != std::string::npos) value = value.substr(0, hash);
  while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
  SourceLoc vloc = loc(peek());
  auto bad = [&](const std::string& what) { throw SpecError(vloc, "invalid value '" + value + "' for " + k + ": " + what); };
  auto is_int = [&](const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
  };
  if (k == "steps" || k == "thr_invariant" || k == "thr_varying") {
    if (!is_int(value)) bad("expected an integer");
  } else if (k == "mode") {
    if (value != "basic" && value != "advanced" && value != "aggressive") bad("expected basic, advanced or aggressive");
  } else if (k == "precision") {
    if (value != "f32" && value != "f64") bad("expected f32 or f64");
  } else if (k == "block") {
    if (value != "auto") {
      std::stringstream ss(value);
      std::string part;
      int n = 0;
      while (std::getline(ss, part, 'x')) {
        if (!is_int(part) || std::stoll(part) < 1) bad("expected auto or NxN...");
        ++n;
      }
      if (n == 0) bad("expected auto or NxN...");
    }
  } else {
    char* endp = nullptr;
    std::strtod(value.c_str(), &endp);
    if (endp == value.c_str() || *endp != '\0') bad("expected a number");
    if (scope_.functions.count(k)) fail(key, "'" + k + "' is a function");
    scope_.scalars.insert(k);
  }
  for (const auto& p : spec.params)
    if (p.first == k) fail(key, "parameter '" + k + "' set twice");
  spec.params.emplace_back(k, value);
  pos_ = toks_.size() - 1;
}

void LineParser::subs(ProblemSpec& spec) {
  Token key = peek();
  std::string name = ident("a symbol name");
  if (scope_.functions.count(name)) fail(key, "cannot substitute function '" + name + "'");
  expect("=");
  SpecExpr e = expr();
  end();
  scope_.scalars.insert(name);
  spec.subs.emplace_back(name, e);
}

void LineParser::init(ProblemSpec& spec) {
  InitSpec in;
  in.loc = loc(toks_[0]);
  Token name = peek();
  in.name = ident("a function name");
  if (!scope_.functions.count(in.name)) fail(name, "undeclared identifier '" + in.name + "'");
  Token how = peek();
  in.how = ident("const=, random= or ricker=");
  if (in.how != "const" && in.how != "random" && in.how != "ricker") fail(how, "unknown initializer '" + in.how + "'");
  expect("=");
  in.value = number();
  if (in.how == "random" && (in.value < 0 || in.value != std::floor(in.value))) fail(how, "random seed must be a non-negative integer");
  if (in.how == "ricker" && !(in.value > 0)) fail(how, "ricker peak frequency must be positive");
  if (in.how == "ricker" && scope_.functions[in.name] != "sparsetimefunction") fail(how, "ricker needs a sparse function");
  if (peek().kind != Tok::End) {
    Token k = peek();
    if (ident("scale=") != "scale" || in.how == "const") fail(k, "unexpected '" + k.text + "'");
    expect("=");
    in.scale = number();
  }
  end();
  spec.inits.push_back(in);
}

void LineParser::parse(ProblemSpec& spec) {
  if (peek().kind == Tok::End) return;
  Token head = peek();
  if (head.kind != Tok::Ident) fail(head, "expected a declaration or equation");
  if (peek(1).kind == Tok::Punct && peek(1).text == "." && (peek(2).text == "inject" || peek(2).text == "interpolate")) {
    next();
    if (!spec.grid.present) fail(head, "grid must be declared before equations");
    sparse_op(spec, head);
    return;
  }
  next();
  const std::string& k = head.text;
  if (k == "grid") {
    grid(spec);
  } else if (k == "function" || k == "timefunction" || k == "sparsetimefunction") {
    function(spec, k);
  } else if (k == "eq") {
    if (!spec.grid.present) fail(head, "grid must be declared before equations");
    equation(spec);
  } else if (k == "param") {
    param(spec);
  } else if (k == "subs") {
    subs(spec);
  } else if (k == "init") {
    init(spec);
  } else {
    fail(head, "unknown statement '" + k + "'");
  }
}

// ---- printing --------------------------------------------------------------------

int prec(const SpecExpr& e) {
  switch (e.kind) {
    case SpecExpr::Kind::Add:
    case SpecExpr::Kind::Sub: return 1;
    case SpecExpr::Kind::Mul:
    case SpecExpr::Kind::Div: return 2;
    case SpecExpr::Kind::Neg: return 3;
    case SpecExpr::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string wrap(const SpecExpr& e, int min_prec) {
  std::string s = print_expr(e);
  return prec(e) < min_prec ? "(" + s + ")" : s;
}

std::string tuple_text(const std::vector<double>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + ")";
}

}  // namespace

std::string print_expr(const SpecExpr& e) {
  using K = SpecExpr::Kind;
  switch (e.kind) {
    case K::Number:
    case K::Name: return e.text;
    case K::Neg: return "-" + wrap(e.args[0], 3);
    case K::Add: return wrap(e.args[0], 1) + " + " + wrap(e.args[1], 2);
    case K::Sub: return wrap(e.args[0], 1) + " - " + wrap(e.args[1], 2);
    case K::Mul: return wrap(e.args[0], 2) + "*" + wrap(e.args[1], 3);
    case K::Div: return wrap(e.args[0], 2) + "/" + wrap(e.args[1], 3);
    case K::Pow: return wrap(e.args[0], 5) + "**" + wrap(e.args[1], 3);
    case K::Call: {
      std::string s = e.text + "(";
      for (size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + print_expr(e.args[i]);
      return s + ")";
    }
    case K::Suffix: return wrap(e.args[0], 5) + "." + e.text;
  }
  return "";
}

bool operator==(const ProblemSpec& a, const ProblemSpec& b) {
  auto grid_eq = a.grid.present == b.grid.present && a.grid.shape == b.grid.shape && a.grid.extent == b.grid.extent &&
                 a.grid.origin == b.grid.origin;
  if (!grid_eq || a.functions.size() != b.functions.size() || a.statements.size() != b.statements.size() ||
      a.params != b.params || a.subs != b.subs || a.inits.size() != b.inits.size())
    return false;
  for (size_t i = 0; i < a.functions.size(); ++i) {
    const auto &f = a.functions[i], &g = b.functions[i];
    if (f.kind != g.kind || f.name != g.name || f.space_order != g.space_order || f.time_order != g.time_order ||
        f.save != g.save || f.factor != g.factor || f.padding != g.padding || f.npoint != g.npoint || f.nt != g.nt ||
        f.coordinates != g.coordinates)
      return false;
  }
  for (size_t i = 0; i < a.statements.size(); ++i) {
    const auto &s = a.statements[i], &t = b.statements[i];
    if (s.kind != t.kind || s.lhs != t.lhs || s.rhs != t.rhs || s.interior != t.interior || s.target != t.target ||
        s.field != t.field || s.expr != t.expr)
      return false;
  }
  for (size_t i = 0; i < a.inits.size(); ++i) {
    const auto &p = a.inits[i], &q = b.inits[i];
    if (p.name != q.name || p.how != q.how || p.value != q.value || p.scale != q.scale) return false;
  }
  return true;
}

ProblemSpec parse_spec(const std::string& text) {
  ProblemSpec spec;
  Scope scope;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    LineParser p(lex(line, lineno), lineno, line, scope);
    p.parse(spec);
  }
  return spec;
}

std::string print_spec(const ProblemSpec& spec) {
  std::ostringstream os;
  if (spec.grid.present) {
    os << "grid shape=(";
    for (size_t i = 0; i < spec.grid.shape.size(); ++i) os << (i ? ", " : "") << spec.grid.shape[i];
    os << ")";
    if (!spec.grid.extent.empty()) os << " extent=" << tuple_text(spec.grid.extent);
    if (!spec.grid.origin.empty()) os << " origin=" << tuple_text(spec.grid.origin);
    os << "\n";
  }
  for (const auto& f : spec.functions) {
    os << f.kind << " " << f.name;
    if (f.kind != "sparsetimefunction" && f.space_order != 2) os << " space_order=" << f.space_order;
    if (f.kind == "timefunction" && f.time_order != 2) os << " time_order=" << f.time_order;
    if (f.save) os << " save=" << f.save;
    if (f.factor) os << " factor=" << f.factor;
    if (f.padding) os << " padding=" << f.padding;
    if (f.npoint) os << " npoint=" << f.npoint;
    if (f.nt) os << " nt=" << f.nt;
    if (!f.coordinates.empty()) {
      os << " coordinates=(";
      for (size_t i = 0; i < f.coordinates.size(); ++i) os << (i ? ", " : "") << tuple_text(f.coordinates[i]);
      os << ")";
    }
    os << "\n";
  }
  for (const auto& [k, v] : spec.params) os << "param " << k << "=" << v << "\n";
  for (const auto& [k, e] : spec.subs) os << "subs " << k << " = " << print_expr(e) << "\n";
  for (const auto& in : spec.inits) {
    os << "init " << in.name << " " << in.how << "=" << format_double(in.value);
    if (in.scale != 1) os << " scale=" << format_double(in.scale);
    os << "\n";
  }
  for (const auto& s : spec.statements) {
    switch (s.kind) {
      case StatementSpec::Kind::Eq:
        os << "eq " << print_expr(s.lhs) << " = " << print_expr(s.rhs) << (s.interior ? " region=interior" : "") << "\n";
        break;
      case StatementSpec::Kind::Inject:
        os << s.target << ".inject(field=" << print_expr(s.field) << ", expr=" << print_expr(s.expr) << ")\n";
        break;
      case StatementSpec::Kind::Interpolate: os << s.target << ".interpolate(" << print_expr(s.expr) << ")\n"; break;
    }
  }
  return os.str();
}

// ---- instantiation ----------------------------------------------------------------

namespace {

struct Builder {
  GridPtr grid;
  const std::map<std::string, FunctionPtr>& functions;

  Expr build(const SpecExpr& e) const {
    using K = SpecExpr::Kind;
    try {
      switch (e.kind) {
        case K::Number:
          if (e.text.find_first_of(".eE") == std::string::npos) return integer(std::stoll(e.text));
          return real(std::strtod(e.text.c_str(), nullptr));
        case K::Name: {
          auto f = functions.find(e.text);
          if (f != functions.end()) return access(f->second);
          if (auto d = grid->index_of(e.text)) return index_of(grid->dims[*d]);
          if (e.text == grid->time->name) return index_of(grid->time);
          return symbol(e.text);
        }
        case K::Neg: return -build(e.args[0]);
        case K::Add: return build(e.args[0]) + build(e.args[1]);
        case K::Sub: return build(e.args[0]) - build(e.args[1]);
        case K::Mul: return build(e.args[0]) * build(e.args[1]);
        case K::Div: return build(e.args[0]) / build(e.args[1]);
        case K::Pow: {
          Expr k = build(e.args[1]);
          if (!k.is_constant() || !k.number().is_integral()) throw SpecError(e.loc, "exponent must be an integer");
          return pow(build(e.args[0]), static_cast<int>(k.number().as_integer()));
        }
        case K::Call: {
          if (e.text == "solve") return solve_for(build(e.args[0]), build(e.args[1]));
          std::vector<Expr> args;
          for (const auto& a : e.args) args.push_back(build(a));
          return call(e.text, args);
        }
        case K::Suffix: return apply_suffix(build(e.args[0]), e.text);
      }
    } catch (const SpecError&) {
      throw;
    } catch (const std::exception& ex) {
      throw SpecError(e.loc, ex.what());
    }
    return Expr();
  }
};

double ricker(double f0, double t) {
  double r = M_PI * f0 * (t - 1.0 / f0);
  return (1 - 2 * r * r) * std::exp(-r * r);
}

}  // namespace

Problem build_problem(const ProblemSpec& spec, int steps) {
  Problem p;
  if (!spec.grid.present) throw SpecError({1, 1}, "no grid declared");
  p.steps = steps;
  if (p.steps <= 0) {
    p.steps = 10;
    for (const auto& [k, v] : spec.params)
      if (k == "steps") p.steps = std::stoi(v);
  }
  if (p.steps < 1) throw SpecError({1, 1}, "steps must be >= 1");
  try {
    p.grid = Grid::make(spec.grid.shape, spec.grid.extent, spec.grid.origin);
  } catch (const std::exception& ex) {
    throw SpecError(spec.grid.loc, ex.what());
  }
  const auto& g = p.grid;

  int subsampled = 0;
  for (const auto& f : spec.functions) {
    try {
      FunctionPtr fn;
      if (f.kind == "function") {
        fn = make_function(f.name, g, f.space_order, f.padding);
      } else if (f.kind == "timefunction") {
        FunctionOptions o;
        o.space_order = f.space_order;
        o.time_order = f.time_order;
        o.save = f.save;
        o.padding = f.padding;
        if (f.factor > 1) {
          o.time_dim = make_conditional_dim(subsampled++ ? "ts_" + f.name : "ts", g->time, f.factor);
          if (!o.save) o.save = (p.steps - 1) / f.factor + 1;
        }
        fn = make_time_function(f.name, g, o);
      } else {
        auto coords = f.coordinates;
        if (coords.empty())
          for (int i = 0; i < f.npoint; ++i) {
            std::vector<double> c;
            for (size_t d = 0; d < g->ndim(); ++d)
              c.push_back(g->origin[d] + g->extent[d] * (i + 1) / (f.npoint + 1));
            coords.push_back(c);
          }
        fn = make_sparse_time_function(f.name, g, f.npoint, f.nt ? f.nt : p.steps + 1, coords);
      }
      p.functions[f.name] = fn;
    } catch (const std::exception& ex) {
      throw SpecError(f.loc, ex.what());
    }
  }

  for (const auto& [k, v] : spec.params) {
    if (k == "mode")
      p.options.dse.mode = parse_dse_mode(v);
    else if (k == "precision")
      p.options.precision = parse_precision(v);
    else if (k == "thr_invariant")
      p.options.dse.thr_invariant = std::stoll(v);
    else if (k == "thr_varying")
      p.options.dse.thr_varying = std::stoll(v);
    else if (k == "block")
      p.options.autotune = v == "auto";
    else if (k != "steps")
      p.params[k] = std::strtod(v.c_str(), nullptr);
  }
  for (const auto& [k, v] : spec.params) {
    if (k != "block" || v == "auto") continue;
    std::stringstream ss(v);
    std::string part;
    size_t d = 0;
    while (std::getline(ss, part, 'x')) {
      if (d < g->ndim()) p.options.block[g->dims[d]->name] = std::stoll(part);
      ++d;
    }
  }
  p.params[lower_symbol(g->time->name)] = 0;
  p.params[upper_symbol(g->time->name)] = p.steps - 1;

  Builder b{g, p.functions};
  Substitutions subs;
  for (const auto& [name, e] : spec.subs) subs[symbol(name)] = substitute(b.build(e), subs);
  auto finish = [&](Equation eq) {
    if (!subs.empty()) eq.rhs = substitute(eq.rhs, subs);
    p.equations.push_back(eq);
  };
  for (const auto& s : spec.statements) {
    switch (s.kind) {
      case StatementSpec::Kind::Eq: {
        Expr lhs = b.build(s.lhs), rhs = b.build(s.rhs);
        try {
          finish(make_eq(lhs, rhs, s.interior ? Region::Interior : Region::Domain));
        } catch (const std::exception& ex) {
          throw SpecError(s.loc, ex.what());
        }
        break;
      }
      case StatementSpec::Kind::Inject:
      case StatementSpec::Kind::Interpolate: {
        std::vector<Equation> eqs;
        try {
          eqs = s.kind == StatementSpec::Kind::Inject ? inject(p.functions.at(s.target), b.build(s.field), b.build(s.expr))
                                                      : interpolate(p.functions.at(s.target), b.build(s.expr));
        } catch (const SpecError&) {
          throw;
        } catch (const std::exception& ex) {
          throw SpecError(s.loc, ex.what());
        }
        for (auto& e : eqs) finish(e);
        break;
      }
    }
  }
  p.inits = spec.inits;
  p.options.autotune_params = p.params;
  return p;
}

void Problem::initialize(Buffers& buffers) const {
  for (const auto& in : inits) {
    auto it = buffers.find(in.name);
    if (it == buffers.end()) continue;
    auto& buf = it->second;
    if (in.how == "const") {
      buf.fill(in.value);
    } else if (in.how == "random") {
      std::mt19937_64 rng(static_cast<uint64_t>(in.value));
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      for (size_t i = 0; i < buf.size(); ++i) buf.set(i, u01(rng) * in.scale);
    } else if (in.how == "ricker") {
      auto dt = params.find("dt");
      if (dt == params.end()) throw std::runtime_error("ricker initializer of '" + in.name + "' needs param dt");
      for (int64_t t = 0; t < buf.extents[0]; ++t)
        for (int64_t q = 0; q < buf.extents[1]; ++q)
          buf.set(static_cast<size_t>(t * buf.strides[0] + q * buf.strides[1]),
                  in.scale * ricker(in.value, static_cast<double>(t) * dt->second));
    }
  }
}

// ---- benchmarks -------------------------------------------------------------------

std::string acoustic_spec(int ndim, int64_t n, int space_order, int steps, bool sparse) {
  std::ostringstream os;
  os << "grid shape=(";
  for (int d = 0; d < ndim; ++d) os << (d ? ", " : "") << n;
  os << ")\n";
  os << "function m space_order=" << space_order << "\n";
  os << "timefunction u space_order=" << space_order << "\n";
  if (sparse) {
    auto point = [&](double frac) {
      std::string s = "(";
      for (int d = 0; d < ndim; ++d) s += (d ? ", " : "") + format_double(frac * static_cast<double>(n - 1));
      return s + ")";
    };
    os << "sparsetimefunction src npoint=1 coordinates=(" << point(0.45) << ")\n";
    os << "sparsetimefunction rec npoint=2 coordinates=(" << point(0.61) << ", " << point(0.3) << ")\n";
  }
  os << "param dt=0.2\nparam steps=" << steps << "\n";
  os << "init m const=0.4444444444444444\n";
  os << "init u random=7 scale=0.001\n";
  if (sparse) os << "init src random=11\n";
  os << "eq u.forward = solve(m*u.dt2 - u.laplace, u.forward) region=interior\n";
  if (sparse) {
    os << "src.inject(field=u.forward, expr=dt*dt*src/m)\n";
    os << "rec.interpolate(u)\n";
  }
  return os.str();
}

std::string running_example_spec() {
  return "grid shape=(11) extent=(10.0)\n"
         "function m\n"
         "timefunction u\n"
         "timefunction us save=25 factor=4\n"
         "sparsetimefunction q npoint=1 coordinates=((3.5))\n"
         "param dt=0.1\n"
         "param steps=100\n"
         "init m const=1.0\n"
         "init q ricker=0.5\n"
         "eq u.forward = solve(m*u.dt2 - u.laplace, u.forward) region=interior\n"
         "eq us = u\n"
         "q.inject(field=u.forward, expr=dt*dt*q/m)\n";
}

Problem tti_problem(int ndim, int64_t n, int space_order, int steps) {
  std::ostringstream os;
  os << "grid shape=(";
  for (int d = 0; d < ndim; ++d) os << (d ? ", " : "") << n;
  os << ")\nfunction m space_order=" << space_order << "\nfunction theta space_order=" << space_order;
  if (ndim == 3) os << "\nfunction phi space_order=" << space_order;
  os << "\ntimefunction u space_order=" << space_order << "\n";
  os << "param dt=0.2\nparam steps=" << steps << "\n";
  os << "init m const=0.4444444444444444\ninit theta random=3\n";
  if (ndim == 3) os << "init phi random=5\n";
  os << "init u random=7 scale=0.001\n";
  Problem p = build_problem(parse_spec(os.str()));

  const auto& g = p.grid;
  Expr U = access(p.functions.at("u")), M = access(p.functions.at("m")), T = access(p.functions.at("theta"));
  int fo = std::max(2, space_order / 2);
  auto d1 = [&](const Expr& e, size_t d) { return derivative(e, g->dims[d], fo, 1); };
  // Rotated derivative along the symmetry axis and its orthogonal complement.
  std::function<Expr(const Expr&)> Gz, Gx;
  if (ndim == 2) {
    Gz = [&](const Expr& e) { return call("sin", {T}) * d1(e, 0) + call("cos", {T}) * d1(e, 1); };
    Gx = [&](const Expr& e) { return call("cos", {T}) * d1(e, 0) - call("sin", {T}) * d1(e, 1); };
  } else {
    Expr P = access(p.functions.at("phi"));
    Gz = [&, P](const Expr& e) {
      return call("sin", {T}) * call("cos", {P}) * d1(e, 0) + call("sin", {T}) * call("sin", {P}) * d1(e, 1) +
             call("cos", {T}) * d1(e, 2);
    };
    Gx = [&, P](const Expr& e) {
      return call("cos", {T}) * call("cos", {P}) * d1(e, 0) + call("cos", {T}) * call("sin", {P}) * d1(e, 1) -
             call("sin", {T}) * d1(e, 2);
    };
  }
  Expr H = Gx(Gx(U)) + Gz(Gz(U));
  Expr fwd = apply_suffix(U, "forward");
  p.equations = {make_eq(fwd, 2 * U - apply_suffix(U, "backward") + symbol("dt") * symbol("dt") / M * H, Region::Interior)};
  return p;
}

}  // namespace stencil
