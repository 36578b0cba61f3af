#include "stencil/operator.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

namespace stencil {

namespace {

void describe_dim(std::ostream& os, const DimPtr& d) {
  os << d->name << ":" << to_string(d->kind) << ":" << d->factor << ":" << d->modulo;
  if (d->parent) os << "<" << d->parent->name;
}

void describe_function(std::ostream& os, const FunctionDecl& f) {
  os << "fn " << f.name << " " << to_string(f.kind) << " so=" << f.space_order << " to=" << f.time_order
     << " save=" << f.save << " npoint=" << f.npoint << " dims=";
  for (const auto& d : f.dims) {
    describe_dim(os, d);
    os << ",";
  }
  os << " shape=";
  for (size_t i = 0; i < f.shape.size(); ++i) os << f.shape[i] << "/" << f.halo[i] << "/" << f.padding[i] << ",";
  for (const auto& c : f.coordinates) {
    os << " (";
    for (double v : c) os << format_double(v) << ",";
    os << ")";
  }
  if (f.grid) {
    os << " grid=";
    for (size_t i = 0; i < f.grid->ndim(); ++i)
      os << f.grid->shape[i] << ":" << format_double(f.grid->extent[i]) << ":" << format_double(f.grid->origin[i]) << ",";
  }
  os << "\n";
}

using Clock = std::chrono::steady_clock;

class PassClock {
 public:
  explicit PassClock(Operator& op) : op_(op) {}
  template <typename F>
  auto operator()(const std::string& name, F&& fn) {
    auto t0 = Clock::now();
    auto out = fn();
    PassRecord r;
    r.pass = name;
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    op_.passes.push_back(r);
    return out;
  }
  void ops(const std::vector<Cluster>& cs) {
    auto& r = op_.passes.back();
    r.measured = true;
    r.clusters = cs.size();
    r.ops = time_loop_ops(cs);
    for (const auto& c : cs) r.total_ops += cluster_ops(c);
  }

 private:
  Operator& op_;
};

}  // namespace

std::string operator_key(const std::vector<Equation>& eqs, const CompileOptions& opts) {
  std::ostringstream os;
  std::map<std::string, FunctionPtr> fns;
  for (const auto& eq : eqs) {
    os << "eq " << to_string(eq) << (eq.region == Region::Interior ? " interior" : "")
       << (eq.is_increment ? " inc" : "") << "\n";
    for (const auto* side : {&eq.lhs, &eq.rhs})
      for (const auto& a : collect_accesses(*side)) {
        fns.emplace(a.name(), a.function());
        if (a.function()->coords) fns.emplace(a.function()->coords->name, a.function()->coords);
      }
  }
  for (const auto& [name, f] : fns) describe_function(os, *f);
  os << "mode=" << to_string(opts.dse.mode) << " thr=" << opts.dse.thr_invariant << "," << opts.dse.thr_varying;
  os << " block=";
  for (const auto& [d, s] : opts.block) os << d << ":" << s << ",";
  os << " autotune=" << opts.autotune;
  if (opts.autotune)
    for (const auto& [k, v] : opts.autotune_params) os << " " << k << "=" << format_double(v);
  os << " precision=" << to_string(opts.precision) << " emit=" << opts.emit.name << ":" << opts.emit.ncores << ":"
     << opts.emit.collapse_threshold << "\n";
  return os.str();
}

uint64_t operator_hash(const std::vector<Equation>& eqs, const CompileOptions& opts) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : operator_key(eqs, opts)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Buffers Operator::allocate() const {
  return allocate_buffers(functions_of(lowered), precision);
}

RunReport Operator::apply(Buffers& buffers, const Params& params, const RunOptions& opts) const {
  return run(iet, buffers, params, opts);
}

OperatorPtr compile(const std::vector<Equation>& eqs, const CompileOptions& opts) {
  auto op = std::make_shared<Operator>();
  op->hash = operator_hash(eqs, opts);
  op->precision = opts.precision;
  PassClock pass(*op);

  op->lowered = pass("lower", [&] { return lower(eqs); });
  op->initial = pass("clusterize", [&] { return clusterize(op->lowered); });
  pass.ops(op->initial);

  // The DSE pipeline, pass by pass so that each one can be measured.
  std::vector<Cluster> cs = op->initial;
  if (opts.dse.mode != DseMode::Basic) {
    cs = pass("factorize", [&] { return factorize(cs); });
    pass.ops(cs);
    TempNamer names(cs);
    cs = pass("extract-invariant",
              [&] { return extract(cs, ExtractClass::TimeInvariant, opts.dse.thr_invariant, names); });
    pass.ops(cs);
    if (opts.dse.mode == DseMode::Aggressive) {
      cs = pass("extract-varying",
                [&] { return extract(cs, ExtractClass::TimeVarying, opts.dse.thr_varying, names); });
      pass.ops(cs);
    }
    cs = pass("contract", [&] { return contract_arrays(cs); });
    pass.ops(cs);
  }
  cs = pass("cse", [&] { return renumber(cse(cs)); });
  pass.ops(cs);
  op->clusters = cs;

  auto iet = pass("build-iet", [&] { return build_iet(op->clusters); });
  iet = pass("analyze", [&] { return analyze_iet(iet); });
  if (opts.autotune) {
    op->block = pass("autotune", [&] {
      auto candidates = default_block_candidates(iet);
      if (candidates.empty()) return BlockShape{};
      auto fns = functions_of(op->lowered);
      auto runner = [&](const IetPtr& candidate) {
        auto prepared = add_sections(place_declarations(candidate));
        auto buffers = allocate_buffers(fns, opts.precision);
        return run(prepared, buffers, opts.autotune_params).seconds;
      };
      return autotune_blocks(iet, runner, candidates);
    });
  } else {
    op->block = opts.block;
  }
  if (!op->block.empty()) iet = pass("block", [&] { return block_loops(iet, op->block); });
  iet = pass("declare", [&] { return place_declarations(iet); });
  op->iet = pass("sections", [&] { return add_sections(iet); });
  op->sections = section_names(op->iet);
  EmitOptions eo = opts.emit;
  eo.precision = opts.precision;
  op->source = pass("emit-c", [&] { return emit_c(op->iet, eo); });
  return op;
}

OperatorPtr OperatorCache::compile(const std::vector<Equation>& eqs, const CompileOptions& opts) {
  auto key = operator_key(eqs, opts);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      last_pass_work_ = 0;
      return it->second;
    }
  }
  auto op = stencil::compile(eqs, opts);
  std::lock_guard<std::mutex> lock(mutex_);
  ++misses_;
  last_pass_work_ = static_cast<int64_t>(op->passes.size());
  pass_work_ += last_pass_work_;
  entries_.emplace(key, op);
  return op;
}

void OperatorCache::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.clear();
}

}  // namespace stencil
