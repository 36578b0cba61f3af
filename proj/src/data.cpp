#include "stencil/data.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace stencil {

std::string to_string(Precision p) { return p == Precision::F64 ? "f64" : "f32"; }

Precision parse_precision(const std::string& s) {
  if (s == "f64" || s == "double") return Precision::F64;
  if (s == "f32" || s == "float") return Precision::F32;
  throw std::invalid_argument("unknown precision '" + s + "' (expected f32 or f64)");
}

size_t DataBuffer::flat(const std::vector<int64_t>& idx) const {
  if (idx.size() != extents.size())
    throw std::out_of_range(name + ": expected " + std::to_string(extents.size()) + " indices");
  size_t off = 0;
  for (size_t d = 0; d < idx.size(); ++d) {
    if (idx[d] < 0 || idx[d] >= extents[d])
      throw std::out_of_range(name + ": index " + std::to_string(idx[d]) + " outside [0, " +
                              std::to_string(extents[d] - 1) + "] along dimension " + std::to_string(d));
    off += static_cast<size_t>(idx[d] * strides[d]);
  }
  return off;
}

void DataBuffer::fill(double v) {
  if (precision == Precision::F64)
    std::fill(f64.begin(), f64.end(), v);
  else
    std::fill(f32.begin(), f32.end(), static_cast<float>(v));
}

DataBuffer make_buffer(const FunctionDecl& fn, Precision p) {
  DataBuffer b;
  b.name = fn.name;
  b.precision = p;
  size_t n = 1;
  for (size_t d = 0; d < fn.ndim(); ++d) {
    b.extents.push_back(fn.allocated(d));
    n *= static_cast<size_t>(fn.allocated(d));
  }
  b.strides.assign(fn.ndim(), 1);
  for (size_t d = fn.ndim(); d-- > 1;) b.strides[d - 1] = b.strides[d] * b.extents[d];
  if (p == Precision::F64)
    b.f64.assign(n, 0.0);
  else
    b.f32.assign(n, 0.0f);
  if (fn.kind == FunctionKind::Coordinates)
    for (size_t i = 0; i < fn.coordinates.size(); ++i)
      for (size_t d = 0; d < fn.coordinates[i].size(); ++d)
        b.set(b.flat({static_cast<int64_t>(i), static_cast<int64_t>(d)}), fn.coordinates[i][d]);
  return b;
}

std::vector<FunctionPtr> functions_of(const std::vector<LoweredEq>& eqs) {
  std::vector<FunctionPtr> out;
  std::set<std::string> seen;
  auto note = [&](const FunctionPtr& f) {
    if (!f || f->is_temp() || !seen.insert(f->name).second) return;
    out.push_back(f);
  };
  for (const auto& e : eqs) {
    if (e.lhs.is_access()) {
      note(e.lhs.function());
      for (const auto& i : e.lhs.operands())
        for (const auto& a : collect_accesses(i)) note(a.function());
    }
    for (const auto& a : collect_accesses(e.rhs)) note(a.function());
  }
  return out;
}

Buffers allocate_buffers(const std::vector<FunctionPtr>& fns, Precision p) {
  Buffers out;
  for (const auto& f : fns) {
    // Coordinates feed floor() index arithmetic and stay in double.
    Precision q = f->kind == FunctionKind::Coordinates ? Precision::F64 : p;
    out.emplace(f->name, make_buffer(*f, q));
  }
  return out;
}

std::vector<int64_t> domain_index(const FunctionDecl& fn, const std::vector<int64_t>& idx) {
  std::vector<int64_t> out(idx.size());
  for (size_t d = 0; d < idx.size(); ++d) out[d] = idx[d] + fn.offset(d);
  return out;
}

Params resolve_params(const std::vector<LoweredEq>& eqs, const Params& given) {
  Params out = given;
  GridPtr grid;
  std::map<std::string, int64_t> extent;  // loop dim -> natural extent
  std::vector<std::string> loop_dims;
  std::map<std::string, DimKind> kinds;
  for (const auto& f : functions_of(eqs)) {
    if (!grid && f->grid) grid = f->grid;
    for (size_t d = 0; d < f->ndim(); ++d) {
      const auto& dim = f->dims[d];
      if ((dim->kind == DimKind::Space || dim->kind == DimKind::Sparse) && !extent.count(dim->name))
        extent[dim->name] = f->shape[d];
    }
  }
  for (const auto& e : eqs)
    for (const auto& it : e.ispace.entries) {
      const auto& n = it.dim()->name;
      if (std::find(loop_dims.begin(), loop_dims.end(), n) == loop_dims.end()) {
        loop_dims.push_back(n);
        kinds[n] = it.dim()->kind;
      }
    }

  if (grid)
    for (size_t d = 0; d < grid->ndim(); ++d) {
      out.emplace(grid->spacing_symbol(d), grid->spacing(d));
      out.emplace(grid->origin_symbol(d), grid->origin[d]);
    }

  auto caps = access_bounds(eqs);
  for (const auto& n : loop_dims) {
    const auto lo_sym = lower_symbol(n), hi_sym = upper_symbol(n);
    auto cap = caps.find(n);
    std::optional<int64_t> lo, hi;
    auto ext = extent.find(n);
    if (ext != extent.end()) {
      lo = 0;
      hi = ext->second - 1;
    } else if (kinds[n] == DimKind::Time) {
      lo = 0;
    }
    if (cap != caps.end()) {
      if (cap->second.lo) lo = lo ? std::max(*lo, *cap->second.lo) : *cap->second.lo;
      if (cap->second.hi) hi = hi ? std::min(*hi, *cap->second.hi) : *cap->second.hi;
    }
    if (!out.count(lo_sym)) {
      if (!lo) throw std::runtime_error("unbound symbol " + lo_sym);
      out[lo_sym] = static_cast<double>(*lo);
    }
    if (!out.count(hi_sym)) {
      if (!hi) throw std::runtime_error("unbound symbol " + hi_sym);
      out[hi_sym] = static_cast<double>(*hi);
    }
  }

  for (const auto& e : eqs) {
    auto check = [&](const Expr& x) {
      visit(x, [&](const Expr& n) {
        if (n.is_symbol() && n.node().role == SymbolRole::Scalar && !out.count(n.name()))
          throw std::runtime_error("unbound symbol " + n.name());
        return true;
      });
    };
    check(e.rhs);
    if (e.lhs.is_access()) check(e.lhs);
  }
  return out;
}

}  // namespace stencil
