#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stencil/lowering.hpp"

namespace stencil {

enum class Precision { F64, F32 };
std::string to_string(Precision p);
Precision parse_precision(const std::string& s);

/// Row-major, zero-initialized storage of one function including halo and padding.
struct DataBuffer {
  std::string name;
  Precision precision = Precision::F64;
  std::vector<int64_t> extents;
  std::vector<int64_t> strides;
  std::vector<double> f64;
  std::vector<float> f32;

  size_t size() const { return precision == Precision::F64 ? f64.size() : f32.size(); }
  double get(size_t i) const { return precision == Precision::F64 ? f64[i] : static_cast<double>(f32[i]); }
  void set(size_t i, double v) {
    if (precision == Precision::F64)
      f64[i] = v;
    else
      f32[i] = static_cast<float>(v);
  }
  /// Flat offset of an allocated-space index; throws when out of range.
  size_t flat(const std::vector<int64_t>& idx) const;
  double at(const std::vector<int64_t>& idx) const { return get(flat(idx)); }
  void fill(double v);
};

DataBuffer make_buffer(const FunctionDecl& fn, Precision p = Precision::F64);

using Buffers = std::map<std::string, DataBuffer>;
using Params = std::map<std::string, double>;

/// Non-temporary functions touched by the equations (coordinate arrays included).
std::vector<FunctionPtr> functions_of(const std::vector<LoweredEq>& eqs);
/// Zeroed buffers for `fns`; coordinate arrays are filled from their sparse function.
Buffers allocate_buffers(const std::vector<FunctionPtr>& fns, Precision p = Precision::F64);

/// Index in allocated space of a domain point: domain index + halo + padding.
std::vector<int64_t> domain_index(const FunctionDecl& fn, const std::vector<int64_t>& idx);

/// Fill in loop bounds (x_m, x_M, t_m, ...), grid spacings and origins that
/// `given` leaves open. Bounds default to the full dimension capped so that no
/// access leaves its allocation; t_M has no default unless some access caps it.
/// Throws std::runtime_error("unbound symbol ...") for anything unresolved.
Params resolve_params(const std::vector<LoweredEq>& eqs, const Params& given);

}  // namespace stencil
