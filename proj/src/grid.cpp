#include "stencil/grid.hpp"

#include <stdexcept>

namespace stencil {

bool same_dim(const Dimension& a, const Dimension& b) {
  if (&a == &b) return true;
  if (a.name != b.name || a.kind != b.kind || a.factor != b.factor || a.modulo != b.modulo) return false;
  if (static_cast<bool>(a.parent) != static_cast<bool>(b.parent)) return false;
  return !a.parent || same_dim(*a.parent, *b.parent);
}

bool same_dim(const DimPtr& a, const DimPtr& b) {
  if (!a || !b) return a == b;
  return same_dim(*a, *b);
}

std::string to_string(DimKind kind) {
  switch (kind) {
    case DimKind::Space: return "space";
    case DimKind::Time: return "time";
    case DimKind::Stepping: return "stepping";
    case DimKind::Conditional: return "conditional";
    case DimKind::Sparse: return "sparse";
    case DimKind::Block: return "block";
  }
  return "?";
}

std::string to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::Function: return "function";
    case FunctionKind::TimeFunction: return "timefunction";
    case FunctionKind::SparseTimeFunction: return "sparsetimefunction";
    case FunctionKind::Coordinates: return "coordinates";
    case FunctionKind::TempArray: return "temparray";
  }
  return "?";
}

namespace {

DimPtr make_dim(Dimension d) { return std::make_shared<const Dimension>(std::move(d)); }

}  // namespace

DimPtr make_space_dim(const std::string& name, const std::string& spacing) {
  Dimension d;
  d.name = name;
  d.kind = DimKind::Space;
  d.spacing = spacing;
  return make_dim(std::move(d));
}

DimPtr make_time_dim(const std::string& name, const std::string& step) {
  Dimension d;
  d.name = name;
  d.kind = DimKind::Time;
  d.spacing = step;
  return make_dim(std::move(d));
}

DimPtr make_stepping_dim(const DimPtr& parent, int modulo) {
  if (modulo < 1) throw std::invalid_argument("stepping modulo must be >= 1");
  Dimension d;
  d.name = parent->name;
  d.kind = DimKind::Stepping;
  d.parent = parent;
  d.spacing = parent->spacing;
  d.modulo = modulo;
  return make_dim(std::move(d));
}

DimPtr make_conditional_dim(const std::string& name, const DimPtr& parent, int factor) {
  if (factor < 1) throw std::invalid_argument("conditional dimension '" + name + "' needs factor >= 1");
  Dimension d;
  d.name = name;
  d.kind = DimKind::Conditional;
  d.parent = parent;
  d.spacing = parent->spacing;
  d.factor = factor;
  return make_dim(std::move(d));
}

DimPtr make_sparse_dim(const std::string& name) {
  Dimension d;
  d.name = name;
  d.kind = DimKind::Sparse;
  return make_dim(std::move(d));
}

DimPtr make_block_dim(const DimPtr& parent) {
  Dimension d;
  d.name = parent->name + "b";
  d.kind = DimKind::Block;
  d.parent = parent;
  d.spacing = parent->spacing;
  return make_dim(std::move(d));
}

std::shared_ptr<const Grid> Grid::make(std::vector<int64_t> shape, std::vector<double> extent,
                                       std::vector<double> origin) {
  if (shape.empty() || shape.size() > 3) throw std::invalid_argument("grid must have 1 to 3 dimensions");
  for (auto s : shape)
    if (s < 2) throw std::invalid_argument("grid shape entries must be >= 2");
  if (extent.empty())
    for (auto s : shape) extent.push_back(static_cast<double>(s - 1));
  if (origin.empty()) origin.assign(shape.size(), 0.0);
  if (extent.size() != shape.size() || origin.size() != shape.size())
    throw std::invalid_argument("grid extent/origin rank does not match shape");
  for (auto e : extent)
    if (!(e > 0)) throw std::invalid_argument("grid extent must be positive");
  auto g = std::make_shared<Grid>();
  g->shape = std::move(shape);
  g->extent = std::move(extent);
  g->origin = std::move(origin);
  static const char* names[] = {"x", "y", "z"};
  for (size_t i = 0; i < g->shape.size(); ++i)
    g->dims.push_back(make_space_dim(names[i], std::string("h_") + names[i]));
  g->time = make_time_dim();
  return g;
}

std::optional<size_t> Grid::index_of(const std::string& dim_name) const {
  for (size_t i = 0; i < dims.size(); ++i)
    if (dims[i]->name == dim_name) return i;
  return std::nullopt;
}

bool FunctionDecl::has_time() const {
  for (const auto& d : dims) {
    const auto& r = d->root();
    if (r.kind == DimKind::Time) return true;
  }
  return false;
}

std::optional<size_t> FunctionDecl::position_of(const std::string& root_name) const {
  for (size_t i = 0; i < dims.size(); ++i)
    if (dims[i]->root().name == root_name || dims[i]->name == root_name) return i;
  return std::nullopt;
}

FunctionPtr make_function(const std::string& name, const GridPtr& grid, int space_order, int padding) {
  if (space_order < 2 || space_order % 2 != 0)
    throw std::invalid_argument("space_order of '" + name + "' must be even and >= 2");
  auto f = std::make_shared<FunctionDecl>();
  f->name = name;
  f->kind = FunctionKind::Function;
  f->grid = grid;
  f->dims = grid->dims;
  f->shape = grid->shape;
  f->halo.assign(grid->ndim(), space_order / 2);
  f->padding.assign(grid->ndim(), padding);
  f->space_order = space_order;
  return f;
}

FunctionPtr make_time_function(const std::string& name, const GridPtr& grid, const FunctionOptions& opts) {
  if (opts.space_order < 2 || opts.space_order % 2 != 0)
    throw std::invalid_argument("space_order of '" + name + "' must be even and >= 2");
  if (opts.time_order < 1) throw std::invalid_argument("time_order of '" + name + "' must be >= 1");
  if (opts.save < 0) throw std::invalid_argument("save of '" + name + "' must be >= 0");
  auto f = std::make_shared<FunctionDecl>();
  f->name = name;
  f->kind = FunctionKind::TimeFunction;
  f->grid = grid;
  f->space_order = opts.space_order;
  f->time_order = opts.time_order;
  f->save = opts.save;
  DimPtr tdim;
  int64_t textent;
  if (opts.save > 0) {
    tdim = opts.time_dim ? opts.time_dim : grid->time;
    textent = opts.save;
  } else {
    if (opts.time_dim) throw std::invalid_argument("time_dim of '" + name + "' requires save");
    tdim = make_stepping_dim(grid->time, opts.time_order + 1);
    textent = opts.time_order + 1;
  }
  f->dims.push_back(tdim);
  f->shape.push_back(textent);
  f->halo.push_back(0);
  f->padding.push_back(0);
  for (size_t i = 0; i < grid->ndim(); ++i) {
    f->dims.push_back(grid->dims[i]);
    f->shape.push_back(grid->shape[i]);
    f->halo.push_back(opts.space_order / 2);
    f->padding.push_back(opts.padding);
  }
  return f;
}

FunctionPtr make_sparse_time_function(const std::string& name, const GridPtr& grid, int npoint, int nt,
                                      std::vector<std::vector<double>> coordinates) {
  if (npoint < 1) throw std::invalid_argument("npoint of '" + name + "' must be >= 1");
  if (nt < 1) throw std::invalid_argument("nt of '" + name + "' must be >= 1");
  if (coordinates.size() != static_cast<size_t>(npoint))
    throw std::invalid_argument("'" + name + "' expects " + std::to_string(npoint) + " coordinates");
  for (size_t p = 0; p < coordinates.size(); ++p) {
    if (coordinates[p].size() != grid->ndim())
      throw std::invalid_argument("coordinate rank mismatch for '" + name + "'");
    for (size_t d = 0; d < grid->ndim(); ++d) {
      double lo = grid->origin[d], hi = grid->origin[d] + grid->extent[d];
      if (coordinates[p][d] < lo || coordinates[p][d] > hi)
        throw std::invalid_argument("coordinate of point " + std::to_string(p) + " of '" + name +
                                    "' lies outside the grid");
    }
  }
  auto pdim = make_sparse_dim("p_" + name);

  auto c = std::make_shared<FunctionDecl>();
  c->name = name + "_coords";
  c->kind = FunctionKind::Coordinates;
  c->grid = grid;
  c->dims = {pdim, make_sparse_dim("d_" + name)};
  c->shape = {npoint, static_cast<int64_t>(grid->ndim())};
  c->halo = {0, 0};
  c->padding = {0, 0};
  c->npoint = npoint;
  c->coordinates = coordinates;

  auto f = std::make_shared<FunctionDecl>();
  f->name = name;
  f->kind = FunctionKind::SparseTimeFunction;
  f->grid = grid;
  f->dims = {grid->time, pdim};
  f->shape = {nt, npoint};
  f->halo = {0, 0};
  f->padding = {0, 0};
  f->time_order = 0;
  f->npoint = npoint;
  f->coordinates = std::move(coordinates);
  f->coords = c;
  return f;
}

FunctionPtr make_temp_array(const std::string& name, std::vector<DimPtr> dims, std::vector<int64_t> shape) {
  auto f = std::make_shared<FunctionDecl>();
  f->name = name;
  f->kind = FunctionKind::TempArray;
  f->dims = std::move(dims);
  f->shape = std::move(shape);
  f->halo.assign(f->dims.size(), 0);
  f->padding.assign(f->dims.size(), 0);
  return f;
}

}  // namespace stencil
