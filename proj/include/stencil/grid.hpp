#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stencil {

enum class DimKind {
  Space,
  Time,
  /// Time index of a modulo-buffered TimeFunction; shares its loop with the parent.
  Stepping,
  /// Sub-sampled parent: active when parent % factor == 0, indexes parent / factor.
  Conditional,
  /// Point index of a sparse function.
  Sparse,
  /// Outer loop produced by blocking a parent dimension.
  Block,
};

struct Dimension;
using DimPtr = std::shared_ptr<const Dimension>;

struct Dimension {
  std::string name;
  DimKind kind = DimKind::Space;
  DimPtr parent;
  /// Symbol whose integer multiples are unit index offsets (h_x, dt).
  std::string spacing;
  int factor = 1;
  int modulo = 0;

  bool is_space() const { return kind == DimKind::Space; }
  bool is_time() const { return kind == DimKind::Time; }
  /// The dimension that actually drives a loop (Stepping/Conditional/Block resolve to the parent).
  const Dimension& root() const { return parent ? parent->root() : *this; }
  DimPtr root_ptr(const DimPtr& self) const { return parent ? parent->root_ptr(parent) : self; }
};

bool same_dim(const Dimension& a, const Dimension& b);
bool same_dim(const DimPtr& a, const DimPtr& b);
std::string to_string(DimKind kind);

DimPtr make_space_dim(const std::string& name, const std::string& spacing);
DimPtr make_time_dim(const std::string& name = "t", const std::string& step = "dt");
DimPtr make_stepping_dim(const DimPtr& parent, int modulo);
DimPtr make_conditional_dim(const std::string& name, const DimPtr& parent, int factor);
DimPtr make_sparse_dim(const std::string& name);
DimPtr make_block_dim(const DimPtr& parent);

/// Structured grid: 1-3 space dimensions plus a time dimension.
struct Grid {
  std::vector<int64_t> shape;
  std::vector<double> extent;
  std::vector<double> origin;
  std::vector<DimPtr> dims;
  DimPtr time;

  static std::shared_ptr<const Grid> make(std::vector<int64_t> shape, std::vector<double> extent = {},
                                          std::vector<double> origin = {});

  size_t ndim() const { return shape.size(); }
  double spacing(size_t d) const { return extent[d] / static_cast<double>(shape[d] - 1); }
  std::string spacing_symbol(size_t d) const { return dims[d]->spacing; }
  std::string origin_symbol(size_t d) const { return "o_" + dims[d]->name; }
  std::optional<size_t> index_of(const std::string& dim_name) const;
};
using GridPtr = std::shared_ptr<const Grid>;

enum class FunctionKind { Function, TimeFunction, SparseTimeFunction, Coordinates, TempArray };
std::string to_string(FunctionKind kind);

struct FunctionDecl;
using FunctionPtr = std::shared_ptr<const FunctionDecl>;

/// A named, grid-backed array. Halo and padding are per dimension and per side.
struct FunctionDecl {
  std::string name;
  FunctionKind kind = FunctionKind::Function;
  GridPtr grid;
  std::vector<DimPtr> dims;
  /// Domain extent per dimension (time: buffer slots, save count, or samples).
  std::vector<int64_t> shape;
  std::vector<int> halo;
  std::vector<int> padding;
  int space_order = 2;
  int time_order = 0;
  int save = 0;
  int npoint = 0;
  std::vector<std::vector<double>> coordinates;
  FunctionPtr coords;

  size_t ndim() const { return dims.size(); }
  bool is_sparse() const { return kind == FunctionKind::SparseTimeFunction; }
  bool is_temp() const { return kind == FunctionKind::TempArray; }
  bool has_time() const;
  /// Position of the dimension whose root is `root_name`, if any.
  std::optional<size_t> position_of(const std::string& root_name) const;
  /// halo + padding on one side.
  int offset(size_t d) const { return halo[d] + padding[d]; }
  int64_t allocated(size_t d) const { return shape[d] + 2 * offset(d); }
  /// Buffer slot count for modulo-buffered time dimensions, 0 otherwise.
  int modulo(size_t d) const { return dims[d]->kind == DimKind::Stepping ? dims[d]->modulo : 0; }
};

struct FunctionOptions {
  int space_order = 2;
  int time_order = 2;
  int save = 0;
  int padding = 0;
  /// Conditional time dimension for sub-sampled saving.
  DimPtr time_dim;
};

FunctionPtr make_function(const std::string& name, const GridPtr& grid, int space_order = 2, int padding = 0);
FunctionPtr make_time_function(const std::string& name, const GridPtr& grid, const FunctionOptions& opts = {});
/// `coordinates` holds one physical position per point; `nt` is the number of time samples.
FunctionPtr make_sparse_time_function(const std::string& name, const GridPtr& grid, int npoint, int nt,
                                      std::vector<std::vector<double>> coordinates);
/// Compiler-generated array over `dims` with the given extent per dimension.
FunctionPtr make_temp_array(const std::string& name, std::vector<DimPtr> dims, std::vector<int64_t> shape);

}  // namespace stencil
