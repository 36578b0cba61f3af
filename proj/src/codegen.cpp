#include "stencil/codegen.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace stencil {

namespace {

enum Prec { kAdd = 1, kMul = 2, kAtom = 3 };

std::string expr_c(const Expr& e, int ctx);

bool linear_index(const Expr& e, std::map<std::string, int64_t>& terms, int64_t& offset, int64_t scale = 1) {
  if (e.is_constant()) {
    if (!e.number().is_integral()) return false;
    offset += scale * e.number().as_integer();
    return true;
  }
  if (e.is_symbol() && e.node().role == SymbolRole::Index) {
    terms[e.name()] += scale;
    return true;
  }
  if (e.is_add()) {
    for (const auto& t : e.operands())
      if (!linear_index(t, terms, offset, scale)) return false;
    return true;
  }
  if (e.is_mul() && e.size() == 2 && e.operand(0).is_constant() && e.operand(0).number().is_integral())
    return linear_index(e.operand(1), terms, offset, scale * e.operand(0).number().as_integer());
  return false;
}

std::string linear_text(const std::map<std::string, int64_t>& terms, int64_t offset) {
  std::string s;
  for (const auto& [v, c] : terms) {
    if (c == 0) continue;
    std::string t = (std::abs(c) == 1 ? "" : std::to_string(std::abs(c)) + "*") + v;
    if (s.empty())
      s = (c < 0 ? "-" : "") + t;
    else
      s += (c < 0 ? " - " : " + ") + t;
  }
  if (s.empty()) return std::to_string(offset);
  if (offset) s += (offset < 0 ? " - " : " + ") + std::to_string(std::abs(offset));
  return s;
}

std::string index_c(const Expr& idx, const FunctionDecl& fn, size_t pos) {
  std::map<std::string, int64_t> terms;
  int64_t offset = 0;
  int m = fn.modulo(pos);
  if (linear_index(idx, terms, offset)) {
    if (!m) return linear_text(terms, offset);
    // Loop variables of modulo-buffered dimensions never go negative.
    int64_t k = ((offset % m) + m) % m;
    std::string base = linear_text(terms, k);
    return (k ? "(" + base + ")" : base) + "%" + std::to_string(m);
  }
  // Sub-sampled time: t/4 (exact under its guard).
  if (idx.is_mul() && idx.size() == 2 && idx.operand(0).is_constant() && idx.operand(0).number().is_exact() &&
      idx.operand(0).number().num() == 1 && idx.operand(1).is_symbol())
    return idx.operand(1).name() + "/" + std::to_string(idx.operand(0).number().den());
  return "(int)(" + expr_c(idx, kAdd) + ")";
}

std::string literal(const Number& n) {
  if (n.is_exact() && n.den() == 1) return std::to_string(n.num());
  return format_double(n.value());
}

std::string power(const Expr& base, int k, int ctx) {
  std::string b = expr_c(base, kAtom);
  std::string s = b;
  for (int i = 1; i < k; ++i) s += "*" + b;
  return (k > 1 && ctx > kMul) ? "(" + s + ")" : s;
}

std::string mul_c(const Expr& e, int ctx) {
  auto [coeff, rest] = split_coefficient(e);
  std::vector<std::string> num, den;
  Number mag = coeff.abs();
  if (mag.is_exact()) {
    if (mag.num() != 1) num.push_back(std::to_string(mag.num()));
    if (mag.den() != 1) den.push_back(format_double(static_cast<double>(mag.den())));
  } else if (!mag.is_one()) {
    num.push_back(format_double(mag.value()));
  }
  for (const auto& f : factors_of(rest)) {
    if (f.is_constant()) continue;
    if (f.is_pow() && f.exponent() < 0)
      den.push_back(power(f.operand(0), -f.exponent(), kAtom));
    else
      num.push_back(expr_c(f, kMul));
  }
  std::string s;
  for (size_t i = 0; i < num.size(); ++i) s += (i ? "*" : "") + num[i];
  if (s.empty()) s = "1.0";
  if (!den.empty()) {
    std::string d;
    for (size_t i = 0; i < den.size(); ++i) d += (i ? "*" : "") + den[i];
    s += "/" + (den.size() > 1 ? "(" + d + ")" : d);
  }
  bool negative = coeff.is_negative();
  if (negative) s = "-" + s;
  if (ctx > kMul || (negative && ctx == kMul)) s = "(" + s + ")";
  return s;
}

std::string expr_c(const Expr& e, int ctx) {
  switch (e.kind()) {
    case ExprKind::Constant: {
      std::string s = literal(e.number());
      return (e.number().is_negative() && ctx > kAdd) ? "(" + s + ")" : s;
    }
    case ExprKind::Symbol: return e.name();
    case ExprKind::Access: {
      std::string s = e.name();
      for (size_t i = 0; i < e.size(); ++i) s += "[" + index_c(e.operand(i), *e.function(), i) + "]";
      return s;
    }
    case ExprKind::Add: {
      std::string s;
      for (size_t i = 0; i < e.size(); ++i) {
        std::string t = expr_c(e.operand(i), kAdd);
        if (i == 0)
          s = t;
        else if (t[0] == '-')
          s += " - " + t.substr(1);
        else
          s += " + " + t;
      }
      return ctx > kAdd ? "(" + s + ")" : s;
    }
    case ExprKind::Mul: return mul_c(e, ctx);
    case ExprKind::Pow: {
      if (e.exponent() > 0) return power(e.operand(0), e.exponent(), ctx);
      std::string s = "1.0/" + power(e.operand(0), -e.exponent(), kAtom);
      return ctx > kAdd ? "(" + s + ")" : s;
    }
    case ExprKind::Call: {
      std::string fn = e.name() == "min" ? "fmin" : e.name() == "max" ? "fmax" : e.name();
      std::string s = fn + "(";
      for (size_t i = 0; i < e.size(); ++i) s += (i ? ", " : "") + expr_c(e.operand(i), kAdd);
      return s + ")";
    }
  }
  return "";
}

std::string dims_suffix(const FunctionDecl& f, size_t from, const std::string& vec) {
  std::string s;
  for (size_t d = from; d < f.ndim(); ++d) s += "[" + (vec.empty() ? std::to_string(f.allocated(d)) : vec + "->size[" + std::to_string(d) + "]") + "]";
  return s;
}

class Emitter {
 public:
  Emitter(const IetPtr& iet, const EmitOptions& opts) : iet_(iet), opts_(opts) {
    ctype_ = opts.precision == Precision::F64 ? "double" : "float";
  }
  std::string run();

 private:
  void line(const std::string& s) { out_ << std::string(static_cast<size_t>(2 * depth_), ' ') << s << "\n"; }
  void node(const IetPtr& n, bool in_parallel);
  void loop(const IetPtr& n, bool in_parallel);
  void statement(const IetNode& n);
  void scalar_decls(const IetNode& n);
  std::string array_decl(const FunctionDecl& f, bool heap) const;
  std::set<std::string> arrays_used(const IetPtr& n) const;

  IetPtr iet_;
  EmitOptions opts_;
  std::string ctype_;
  std::ostringstream out_;
  int depth_ = 0;
  bool atomic_ = false;
  std::vector<Declaration> per_thread_;
};

std::set<std::string> Emitter::arrays_used(const IetPtr& n) const {
  std::set<std::string> out;
  for (const auto& s : statements(n)) {
    if (s->eq.lhs.is_access()) out.insert(s->eq.lhs.name());
    for (const auto& a : collect_accesses(s->eq.rhs)) out.insert(a.name());
  }
  return out;
}

std::string Emitter::array_decl(const FunctionDecl& f, bool heap) const {
  const std::string t = "double";
  if (!heap) return t + " " + f.name + dims_suffix(f, 0, "") + ";";
  std::string size = "sizeof(" + t + ")";
  for (size_t d = 0; d < f.ndim(); ++d) size += "*" + std::to_string(f.allocated(d));
  std::string tail = dims_suffix(f, 1, "");
  return t + " (*" + f.name + ")" + tail + " = (" + t + " (*)" + tail + ") malloc(" + size + ");";
}

void Emitter::scalar_decls(const IetNode& n) {
  for (const auto& d : n.decls)
    if (!d.array) line("double " + d.name + ";");
}

void Emitter::statement(const IetNode& n) {
  const auto& eq = n.eq;
  std::string lhs = expr_c(eq.lhs, kAdd);
  if (atomic_ && eq.is_increment && eq.rhs.is_add()) {
    std::vector<Expr> rest;
    bool found = false;
    for (const auto& t : eq.rhs.operands()) {
      if (!found && t == eq.lhs) {
        found = true;
        continue;
      }
      rest.push_back(t);
    }
    if (found) {
      line("#pragma omp atomic update");
      line(lhs + " += " + expr_c(add(rest), kAdd) + ";");
      return;
    }
  }
  line(lhs + " = " + expr_c(eq.rhs, kAdd) + ";");
}

void Emitter::loop(const IetPtr& n, bool in_parallel) {
  bool parallel = n->has(LoopProperty::Parallel) && !in_parallel;
  std::vector<IetPtr> chain = {n};
  if (parallel) {
    int64_t k = 1;
    if (opts_.ncores > opts_.collapse_threshold && !n->has(LoopProperty::Atomic))
      while (chain.back()->children.size() == 1 && chain.back()->children[0]->is_loop() &&
             chain.back()->children[0]->has(LoopProperty::Parallel) &&
             !chain.back()->children[0]->has(LoopProperty::Atomic) && !chain.back()->children[0]->block &&
             chain.back()->decls.empty())
        chain.push_back(chain.back()->children[0]);
    k = static_cast<int64_t>(chain.size());
    std::string p = "#pragma omp parallel for";
    if (k > 1) p += " collapse(" + std::to_string(k) + ")";
    p += " schedule(static)";
    line(p);
  } else if (n->has(LoopProperty::Vectorizable)) {
    line("#pragma omp simd");
  }
  for (size_t i = 0; i < chain.size(); ++i) {
    const auto& it = *chain[i];
    std::string lb = lower_bound_text(it), ub = upper_bound_text(it);
    for (auto* s : {&lb, &ub}) {
      auto at = s->find("min(");
      if (at != std::string::npos) s->replace(at, 4, "MIN(");
    }
    const auto& v = loop_var(it);
    std::string step = std::to_string(it.block ? 1 : it.step);
    if (it.direction == Direction::Backward)
      line("for (int " + v + " = " + ub + "; " + v + " >= " + lb + "; " + v + " -= " + step + ")");
    else
      line("for (int " + v + " = " + lb + "; " + v + " <= " + ub + "; " + v + " += " + step + ")");
    line("{");
    ++depth_;
    scalar_decls(it);
  }
  bool saved = atomic_;
  if (n->has(LoopProperty::Atomic)) atomic_ = true;
  if (parallel) {
    auto used = arrays_used(n);
    for (const auto& d : per_thread_)
      if (used.count(d.name)) line(array_decl(*d.array, false));
  }
  for (const auto& c : chain.back()->children) node(c, in_parallel || parallel);
  atomic_ = saved;
  for (size_t i = 0; i < chain.size(); ++i) {
    --depth_;
    line("}");
  }
}

void Emitter::node(const IetPtr& n, bool in_parallel) {
  switch (n->kind) {
    case IetKind::Block:
      for (const auto& c : n->children) node(c, in_parallel);
      break;
    case IetKind::Iteration: loop(n, in_parallel); break;
    case IetKind::Expression: statement(*n); break;
    case IetKind::Conditional: {
      std::string cond;
      for (size_t i = 0; i < n->guards.size(); ++i) cond += (i ? " && " : "") + n->guards[i].str();
      line("if (" + cond + ")");
      line("{");
      ++depth_;
      scalar_decls(*n);
      for (const auto& c : n->children) node(c, in_parallel);
      --depth_;
      line("}");
      break;
    }
    case IetKind::Section: {
      const auto& s = n->name;
      line("/* " + s + " */");
      line("{");
      ++depth_;
      line("struct timeval start_" + s + ", end_" + s + ";");
      line("gettimeofday(&start_" + s + ", NULL);");
      for (const auto& c : n->children) node(c, in_parallel);
      line("gettimeofday(&end_" + s + ", NULL);");
      line("timers->" + s + " += (double)(end_" + s + ".tv_sec - start_" + s + ".tv_sec) + (double)(end_" + s +
           ".tv_usec - start_" + s + ".tv_usec)/1000000;");
      --depth_;
      line("}");
      break;
    }
  }
}

std::string Emitter::run() {
  // Signature pieces.
  std::map<std::string, FunctionPtr> functions;
  std::set<std::string> doubles, ints;
  for (const auto& s : statements(iet_)) {
    std::vector<Expr> parts = {s->eq.rhs};
    if (s->eq.lhs.is_access()) parts.push_back(s->eq.lhs);
    for (const auto& p : parts)
      visit(p, [&](const Expr& n) {
        if (n.is_access() && !n.function()->is_temp()) functions[n.name()] = n.function();
        if (n.is_symbol() && n.node().role == SymbolRole::Scalar) doubles.insert(n.name());
        return true;
      });
  }
  for (const auto& it : iterations(iet_)) {
    ints.insert(lower_symbol(bound_dim(*it).name));
    ints.insert(upper_symbol(bound_dim(*it).name));
  }
  auto sections = section_names(iet_);

  out_ << "#define _POSIX_C_SOURCE 200809L\n";
  out_ << "#include <math.h>\n#include <stdlib.h>\n#include <sys/time.h>\n\n";
  out_ << "#define MIN(a, b) (((a) < (b)) ? (a) : (b))\n\n";
  out_ << "struct dataobj\n{\n  void *restrict data;\n  int *size;\n};\n\n";
  if (!sections.empty()) {
    out_ << "struct profiler\n{\n";
    for (const auto& s : sections) out_ << "  double " << s << ";\n";
    out_ << "};\n\n";
  }
  std::vector<std::string> args;
  for (const auto& [name, f] : functions) args.push_back("struct dataobj *restrict " + name + "_vec");
  for (const auto& d : doubles) args.push_back("const double " + d);
  for (const auto& i : ints) args.push_back("const int " + i);
  if (!sections.empty()) args.push_back("struct profiler *timers");
  out_ << "int " << opts_.name << "(";
  if (args.empty()) out_ << "void";
  for (size_t i = 0; i < args.size(); ++i) out_ << (i ? ", " : "") << args[i];
  out_ << ")\n{\n";
  depth_ = 1;
  for (const auto& [name, f] : functions) {
    std::string t = f->kind == FunctionKind::Coordinates ? "double" : ctype_;
    std::string tail = dims_suffix(*f, 1, name + "_vec");
    line(t + " (*restrict " + name + ")" + tail + " = (" + t + " (*)" + tail + ") " + name + "_vec->data;");
  }
  std::vector<std::string> heap;
  for (const auto& d : iet_->decls) {
    if (d.array && d.per_thread) {
      per_thread_.push_back(d);
    } else if (d.array) {
      line(array_decl(*d.array, true));
      heap.push_back(d.name);
    } else {
      line("double " + d.name + ";");
    }
  }
  if (!functions.empty() || !iet_->decls.empty()) out_ << "\n";
  node(iet_, false);
  for (const auto& h : heap) line("free(" + h + ");");
  line("return 0;");
  out_ << "}\n";
  return out_.str();
}

}  // namespace

std::string c_expr(const Expr& e) { return expr_c(e, kAdd); }

std::string emit_c(const IetPtr& iet, const EmitOptions& opts) {
  Emitter e(iet, opts);
  return e.run();
}

}  // namespace stencil
