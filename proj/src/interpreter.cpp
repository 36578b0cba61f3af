#include "stencil/interpreter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace stencil {

namespace {

// ---- worker pool -------------------------------------------------------------------

class Pool {
 public:
  explicit Pool(int n) : size_(std::max(1, n)) {
    for (int w = 1; w < size_; ++w) threads_.emplace_back([this, w] { loop(w); });
  }
  ~Pool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }
  int size() const { return size_; }

  // fn(w) for every worker; the caller acts as worker 0. The first exception wins.
  void run(const std::function<void(int)>& fn) {
    if (size_ == 1) {
      fn(0);
      return;
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      job_ = &fn;
      pending_ = size_ - 1;
      error_ = nullptr;
      ++generation_;
    }
    cv_.notify_all();
    try {
      fn(0);
    } catch (...) {
      std::lock_guard<std::mutex> lk(mu_);
      if (!error_) error_ = std::current_exception();
    }
    std::unique_lock<std::mutex> lk(mu_);
    done_.wait(lk, [&] { return pending_ == 0; });
    job_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void loop(int w) {
    uint64_t seen = 0;
    while (true) {
      const std::function<void(int)>* job;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
        job = job_;
      }
      try {
        (*job)(w);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu_);
        if (!error_) error_ = std::current_exception();
      }
      {
        std::lock_guard<std::mutex> lk(mu_);
        if (--pending_ == 0) done_.notify_one();
      }
    }
  }

  int size_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, done_;
  const std::function<void(int)>* job_ = nullptr;
  int pending_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

// ---- bytecode ----------------------------------------------------------------------

enum class Op : uint8_t { Const, Scalar, IVar, Load, Add, Mul, Pow, Call };

struct Instr {
  Op op = Op::Const;
  int32_t a = 0;  // slot / access / arity / exponent
  int32_t n = 0;  // builtin code
  double c = 0;
};

int builtin_code(const std::string& name) {
  static const std::vector<std::string> names = {"sin", "cos", "sqrt", "floor", "min", "max"};
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument("unknown builtin '" + name + "'");
  return static_cast<int>(it - names.begin());
}

struct Program {
  std::vector<Instr> code;
};

struct Pos {
  // sum(coeff * iv[slot]) + offset, or an index program rounded to an integer.
  std::vector<std::pair<int, int64_t>> terms;
  int64_t offset = 0;
  int program = -1;
  int64_t modulo = 0;
  int64_t extent = 0;
  int64_t stride = 0;
};

struct AccessSpec {
  int buffer = 0;
  std::string name;
  std::vector<Pos> pos;
};

struct Stmt {
  int id = 0;
  int rhs = 0;
  int scalar = -1;   // scalar lhs slot
  int access = -1;   // array lhs
  std::vector<std::pair<std::string, int>> trace_dims;
};

struct XNode {
  IetKind kind = IetKind::Block;
  // Iteration
  int slot = -1, bslot = -1;
  int64_t core_lo = 0, core_hi = 0, lower = 0, upper = 0, step = 1, clamp = 0;
  bool parallel = false, backward = false, innermost = false;
  // Conditional
  std::vector<std::pair<int, int>> guards;
  // Expression
  int stmt = -1;
  // Section
  int section = -1;
  std::vector<XNode> children;
};

struct Store {
  double* d = nullptr;
  float* f = nullptr;
};

struct Frame {
  std::vector<int64_t> iv;
  std::vector<double> sv;
  std::vector<double> stack;
  std::vector<Store> stores;
  int64_t points = 0;
  std::vector<Visit>* trace = nullptr;
};

class Machine {
 public:
  Machine(const IetPtr& iet, Buffers& buffers, const Params& params, const RunOptions& opts);
  RunReport execute();

 private:
  int scalar_slot(const std::string& name);
  int ivar_slot(const std::string& name);
  int compile_expr(const Expr& e);
  void emit(const Expr& e, Program& p);
  int compile_access(const Expr& a);
  XNode compile_node(const IetPtr& n, std::vector<std::string>& loops);

  double eval(int program, Frame& f, size_t base) const;
  size_t locate(int access, Frame& f, size_t base) const;
  void exec(const XNode& n, Frame& f, bool in_parallel);
  void exec_loop(const XNode& n, Frame& f, bool in_parallel);
  void exec_stmt(const Stmt& s, Frame& f) const;
  Store bind(DataBuffer& b) const;

  Buffers& buffers_;
  Params params_;
  RunOptions opts_;
  IetPtr iet_;

  std::map<std::string, int> scalar_slots_, ivar_slots_;
  std::vector<double> scalar_init_;
  std::vector<Program> programs_;
  std::vector<AccessSpec> accesses_;
  std::vector<Stmt> stmts_;
  std::map<std::string, int> buffer_ids_;
  std::vector<DataBuffer*> shared_;     // by buffer id; null for per-thread temps
  std::vector<FunctionPtr> per_thread_;  // by buffer id; null for shared
  std::vector<DataBuffer> owned_;
  std::vector<std::vector<DataBuffer>> private_;  // per worker
  std::vector<SectionStats> sections_;
  XNode root_;
  std::unique_ptr<Pool> pool_;
  std::vector<Frame> frames_;
  size_t stack_size_ = 16;
};

int Machine::scalar_slot(const std::string& name) {
  auto it = scalar_slots_.find(name);
  if (it != scalar_slots_.end()) return it->second;
  int s = static_cast<int>(scalar_init_.size());
  scalar_slots_[name] = s;
  auto p = params_.find(name);
  scalar_init_.push_back(p == params_.end() ? 0.0 : p->second);
  return s;
}

int Machine::ivar_slot(const std::string& name) {
  auto it = ivar_slots_.find(name);
  if (it != ivar_slots_.end()) return it->second;
  int s = static_cast<int>(ivar_slots_.size());
  ivar_slots_[name] = s;
  return s;
}

void Machine::emit(const Expr& e, Program& p) {
  Instr in;
  switch (e.kind()) {
    case ExprKind::Constant:
      in.op = Op::Const;
      in.c = e.number().value();
      break;
    case ExprKind::Symbol:
      if (e.node().role == SymbolRole::Index) {
        in.op = Op::IVar;
        in.a = ivar_slot(e.name());
      } else {
        if (e.node().role == SymbolRole::Scalar && !params_.count(e.name()))
          throw std::runtime_error("unbound symbol " + e.name());
        in.op = Op::Scalar;
        in.a = scalar_slot(e.name());
      }
      break;
    case ExprKind::Access:
      in.op = Op::Load;
      in.a = compile_access(e);
      break;
    case ExprKind::Add:
    case ExprKind::Mul:
      for (const auto& o : e.operands()) emit(o, p);
      in.op = e.is_add() ? Op::Add : Op::Mul;
      in.a = static_cast<int32_t>(e.size());
      break;
    case ExprKind::Pow:
      emit(e.operand(0), p);
      in.op = Op::Pow;
      in.a = e.exponent();
      break;
    case ExprKind::Call:
      for (const auto& o : e.operands()) emit(o, p);
      in.op = Op::Call;
      in.a = static_cast<int32_t>(e.size());
      in.n = builtin_code(e.name());
      break;
  }
  p.code.push_back(std::move(in));
}

int Machine::compile_expr(const Expr& e) {
  Program p;
  emit(e, p);
  programs_.push_back(std::move(p));
  return static_cast<int>(programs_.size()) - 1;
}

// Integer-linear form of an index over index symbols, if any.
bool linearize(const Expr& e, std::map<std::string, int64_t>& terms, int64_t& offset, int64_t scale = 1) {
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
      if (!linearize(t, terms, offset, scale)) return false;
    return true;
  }
  if (e.is_mul() && e.size() == 2 && e.operand(0).is_constant() && e.operand(0).number().is_integral())
    return linearize(e.operand(1), terms, offset, scale * e.operand(0).number().as_integer());
  return false;
}

int Machine::compile_access(const Expr& a) {
  const auto& fn = a.function();
  auto id = buffer_ids_.find(fn->name);
  if (id == buffer_ids_.end()) {
    int b = static_cast<int>(shared_.size());
    buffer_ids_[fn->name] = b;
    if (fn->is_temp()) {
      // Not declared: one shared instance.
      owned_.push_back(make_buffer(*fn, Precision::F64));
      shared_.push_back(nullptr);
      per_thread_.push_back(nullptr);
    } else {
      auto buf = buffers_.find(fn->name);
      if (buf == buffers_.end()) throw std::runtime_error("no data buffer for '" + fn->name + "'");
      shared_.push_back(&buf->second);
      per_thread_.push_back(nullptr);
    }
    id = buffer_ids_.find(fn->name);
  }
  AccessSpec spec;
  spec.buffer = id->second;
  spec.name = fn->name;
  for (size_t i = 0; i < a.size(); ++i) {
    Pos p;
    std::map<std::string, int64_t> terms;
    if (linearize(a.operand(i), terms, p.offset)) {
      for (const auto& [v, c] : terms)
        if (c != 0) p.terms.emplace_back(ivar_slot(v), c);
    } else {
      p.program = compile_expr(a.operand(i));
    }
    p.modulo = fn->modulo(i);
    p.extent = fn->allocated(i);
    spec.pos.push_back(std::move(p));
  }
  int64_t stride = 1;
  for (size_t i = spec.pos.size(); i-- > 0;) {
    spec.pos[i].stride = stride;
    stride *= spec.pos[i].extent;
  }
  accesses_.push_back(std::move(spec));
  return static_cast<int>(accesses_.size()) - 1;
}

XNode Machine::compile_node(const IetPtr& n, std::vector<std::string>& loops) {
  XNode x;
  x.kind = n->kind;
  switch (n->kind) {
    case IetKind::Iteration: {
      x.slot = ivar_slot(n->dim->name);
      if (n->block) x.bslot = ivar_slot(n->block->name);
      const auto& d = bound_dim(*n);
      int64_t s = (n->interval.region == Region::Interior && d.is_space()) ? 1 : 0;
      auto bound = [&](const std::string& sym) {
        auto p = params_.find(sym);
        if (p == params_.end()) throw std::runtime_error("unbound symbol " + sym);
        return static_cast<int64_t>(std::llround(p->second));
      };
      x.core_lo = bound(lower_symbol(d.name)) + s;
      x.core_hi = bound(upper_symbol(d.name)) - s;
      x.lower = n->interval.lower;
      x.upper = n->interval.upper;
      x.step = n->step;
      x.clamp = n->clamp;
      x.parallel = n->has(LoopProperty::Parallel) && !n->has(LoopProperty::Atomic);
      x.backward = n->direction == Direction::Backward;
      x.innermost = iterations(n).size() == 1;
      loops.push_back(n->dim->name);
      break;
    }
    case IetKind::Conditional:
      for (const auto& g : n->guards) x.guards.emplace_back(ivar_slot(g.dim->name), g.factor);
      break;
    case IetKind::Section:
      x.section = static_cast<int>(sections_.size());
      sections_.push_back({n->name, 0, 0});
      break;
    case IetKind::Expression: {
      Stmt s;
      s.id = n->eq.id;
      auto check_indices = [&](const Expr& e) {
        visit(e, [&](const Expr& k) {
          if (k.is_symbol() && k.node().role == SymbolRole::Index &&
              std::find(loops.begin(), loops.end(), k.name()) == loops.end())
            throw std::logic_error("index " + k.name() + " used outside its loop in " + n->eq.str());
          return true;
        });
      };
      check_indices(n->eq.rhs);
      check_indices(n->eq.lhs);
      s.rhs = compile_expr(n->eq.rhs);
      if (n->eq.lhs.is_access())
        s.access = compile_access(n->eq.lhs);
      else
        s.scalar = scalar_slot(n->eq.lhs.name());
      for (const auto& e : n->eq.ispace.entries) s.trace_dims.emplace_back(e.dim()->name, ivar_slot(e.dim()->name));
      x.stmt = static_cast<int>(stmts_.size());
      stmts_.push_back(std::move(s));
      break;
    }
    case IetKind::Block: break;
  }
  for (const auto& c : n->children) x.children.push_back(compile_node(c, loops));
  if (n->kind == IetKind::Iteration) loops.pop_back();
  return x;
}

Machine::Machine(const IetPtr& iet, Buffers& buffers, const Params& params, const RunOptions& opts)
    : buffers_(buffers), opts_(opts) {
  iet_ = iet->decls.empty() ? place_declarations(iet) : iet;
  std::vector<LoweredEq> eqs;
  for (const auto& s : statements(iet_)) eqs.push_back(s->eq);
  params_ = resolve_params(eqs, params);
  if (opts_.trace) opts_.workers = 1;

  // Declared temporaries first so per-thread arrays get their own slots.
  for (const auto& d : iet_->decls) {
    if (!d.array) continue;
    int b = static_cast<int>(shared_.size());
    buffer_ids_[d.name] = b;
    if (d.per_thread && opts_.workers > 1) {
      shared_.push_back(nullptr);
      per_thread_.push_back(d.array);
    } else {
      owned_.push_back(make_buffer(*d.array, Precision::F64));
      shared_.push_back(nullptr);
      per_thread_.push_back(nullptr);
    }
  }
  std::vector<std::string> loops;
  root_ = compile_node(iet_, loops);
  // Every instruction pushes at most one value; index programs stack on top.
  for (const auto& p : programs_) stack_size_ += p.code.size();
}

Store Machine::bind(DataBuffer& b) const {
  Store s;
  if (b.precision == Precision::F64)
    s.d = b.f64.data();
  else
    s.f = b.f32.data();
  return s;
}

size_t Machine::locate(int access, Frame& f, size_t base) const {
  const auto& a = accesses_[static_cast<size_t>(access)];
  size_t off = 0;
  for (const auto& p : a.pos) {
    int64_t v;
    if (p.program >= 0) {
      v = static_cast<int64_t>(std::llround(eval(p.program, f, base)));
    } else {
      v = p.offset;
      for (const auto& [slot, c] : p.terms) v += c * f.iv[static_cast<size_t>(slot)];
    }
    if (p.modulo) v = ((v % p.modulo) + p.modulo) % p.modulo;
    if (v < 0 || v >= p.extent)
      throw std::out_of_range("out-of-bounds access to " + a.name + ": index " + std::to_string(v) +
                              " outside [0, " + std::to_string(p.extent - 1) + "]");
    off += static_cast<size_t>(v * p.stride);
  }
  return off;
}

double Machine::eval(int program, Frame& f, size_t base) const {
  const auto& code = programs_[static_cast<size_t>(program)].code;
  double* st = f.stack.data();
  size_t sp = base;
  for (const auto& in : code) {
    switch (in.op) {
      case Op::Const: st[sp++] = in.c; break;
      case Op::Scalar: st[sp++] = f.sv[static_cast<size_t>(in.a)]; break;
      case Op::IVar: st[sp++] = static_cast<double>(f.iv[static_cast<size_t>(in.a)]); break;
      case Op::Load: {
        size_t off = locate(in.a, f, sp);
        const Store& s = f.stores[static_cast<size_t>(accesses_[static_cast<size_t>(in.a)].buffer)];
        st[sp++] = s.d ? s.d[off] : static_cast<double>(s.f[off]);
        break;
      }
      case Op::Add: {
        size_t k = sp - static_cast<size_t>(in.a);
        double r = 0;
        for (size_t i = k; i < sp; ++i) r += st[i];
        st[k] = r;
        sp = k + 1;
        break;
      }
      case Op::Mul: {
        size_t k = sp - static_cast<size_t>(in.a);
        double r = 1;
        for (size_t i = k; i < sp; ++i) r *= st[i];
        st[k] = r;
        sp = k + 1;
        break;
      }
      case Op::Pow: {
        double b = st[sp - 1], r = 1;
        for (int i = 0; i < std::abs(in.a); ++i) r *= b;
        st[sp - 1] = in.a < 0 ? 1.0 / r : r;
        break;
      }
      case Op::Call: {
        size_t k = sp - static_cast<size_t>(in.a);
        double x = st[k], r = 0;
        switch (in.n) {
          case 0: r = std::sin(x); break;
          case 1: r = std::cos(x); break;
          case 2: r = std::sqrt(x); break;
          case 3: r = std::floor(x); break;
          case 4: r = std::min(x, st[k + 1]); break;
          default: r = std::max(x, st[k + 1]); break;
        }
        st[k] = r;
        sp = k + 1;
        break;
      }
    }
  }
  return st[base];
}

void Machine::exec_stmt(const Stmt& s, Frame& f) const {
  double v = eval(s.rhs, f, 0);
  if (s.scalar >= 0) {
    f.sv[static_cast<size_t>(s.scalar)] = v;
  } else {
    size_t off = locate(s.access, f, 0);
    const Store& st = f.stores[static_cast<size_t>(accesses_[static_cast<size_t>(s.access)].buffer)];
    if (st.d)
      st.d[off] = v;
    else
      st.f[off] = static_cast<float>(v);
  }
  if (f.trace) {
    Visit vis;
    vis.eq = s.id;
    for (const auto& [name, slot] : s.trace_dims) vis.point.emplace_back(name, f.iv[static_cast<size_t>(slot)]);
    f.trace->push_back(std::move(vis));
  }
}

void Machine::exec_loop(const XNode& n, Frame& f, bool in_parallel) {
  int64_t lo, hi, step = 1;
  if (n.bslot >= 0) {
    int64_t b = f.iv[static_cast<size_t>(n.bslot)];
    lo = b + n.lower;
    hi = std::min(b + n.step - 1, n.core_hi + n.clamp) + n.upper;
  } else {
    lo = n.core_lo + n.lower;
    hi = n.core_hi + n.upper;
    step = n.step;
  }
  if (hi < lo) return;
  int64_t count = (hi - lo) / step + 1;
  auto body = [&](Frame& fr, int64_t k0, int64_t k1, bool par) {
    auto& iv = fr.iv[static_cast<size_t>(n.slot)];
    for (int64_t k = k0; k < k1; ++k) {
      iv = n.backward ? lo + (count - 1 - k) * step : lo + k * step;
      if (n.innermost) ++fr.points;
      for (const auto& c : n.children) exec(c, fr, par);
    }
  };
  if (!n.parallel || in_parallel || !pool_ || count < 2) {
    body(f, 0, count, in_parallel);
    return;
  }
  int workers = std::min<int64_t>(pool_->size(), count);
  for (int w = 1; w < workers; ++w) {
    frames_[static_cast<size_t>(w)].iv = f.iv;
    frames_[static_cast<size_t>(w)].sv = f.sv;
    frames_[static_cast<size_t>(w)].points = 0;
  }
  pool_->run([&](int w) {
    if (w >= workers) return;
    Frame& fr = w == 0 ? f : frames_[static_cast<size_t>(w)];
    int64_t k0 = count * w / workers, k1 = count * (w + 1) / workers;
    body(fr, k0, k1, true);
  });
  for (int w = 1; w < workers; ++w) f.points += frames_[static_cast<size_t>(w)].points;
}

void Machine::exec(const XNode& n, Frame& f, bool in_parallel) {
  switch (n.kind) {
    case IetKind::Block:
      for (const auto& c : n.children) exec(c, f, in_parallel);
      break;
    case IetKind::Iteration: exec_loop(n, f, in_parallel); break;
    case IetKind::Conditional:
      for (const auto& [slot, factor] : n.guards)
        if (f.iv[static_cast<size_t>(slot)] % factor != 0) return;
      for (const auto& c : n.children) exec(c, f, in_parallel);
      break;
    case IetKind::Expression: exec_stmt(stmts_[static_cast<size_t>(n.stmt)], f); break;
    case IetKind::Section: {
      auto t0 = std::chrono::steady_clock::now();
      int64_t saved = f.points;
      f.points = 0;
      for (const auto& c : n.children) exec(c, f, in_parallel);
      int64_t pts = f.points;
      f.points += saved;
      auto& s = sections_[static_cast<size_t>(n.section)];
      s.points += pts;
      s.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      break;
    }
  }
}

RunReport Machine::execute() {
  int workers = std::max(1, opts_.workers);
  if (workers > 1) pool_ = std::make_unique<Pool>(workers);
  frames_.resize(static_cast<size_t>(workers));
  private_.resize(static_cast<size_t>(workers));
  size_t owned_at = 0;
  std::vector<Store> shared_stores(shared_.size());
  for (size_t b = 0; b < shared_.size(); ++b) {
    if (shared_[b]) {
      shared_stores[b] = bind(*shared_[b]);
    } else if (!per_thread_[b]) {
      shared_stores[b] = bind(owned_[owned_at++]);
    }
  }
  for (int w = 0; w < workers; ++w) {
    Frame& f = frames_[static_cast<size_t>(w)];
    f.iv.assign(ivar_slots_.size(), 0);
    f.sv = scalar_init_;
    f.stack.assign(stack_size_, 0.0);
    f.points = 0;
    f.stores = shared_stores;
    auto& mine = private_[static_cast<size_t>(w)];
    for (size_t b = 0; b < per_thread_.size(); ++b)
      if (per_thread_[b]) mine.push_back(make_buffer(*per_thread_[b], Precision::F64));
    size_t k = 0;
    for (size_t b = 0; b < per_thread_.size(); ++b)
      if (per_thread_[b]) f.stores[b] = bind(mine[k++]);
  }
  RunReport report;
  if (opts_.trace) frames_[0].trace = &report.trace;
  auto t0 = std::chrono::steady_clock::now();
  exec(root_, frames_[0], false);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.sections = sections_;
  report.params = params_;
  return report;
}

}  // namespace

RunReport run(const IetPtr& iet, Buffers& buffers, const Params& params, const RunOptions& opts) {
  Machine m(iet, buffers, params, opts);
  return m.execute();
}

}  // namespace stencil
