#pragma once

// Helpers shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stencil/problem.hpp"

namespace stencil::testing {

/// (depth, shape) per node of an arrow-style IET dump: "for x", "if t%4==0",
/// "eq u". Bounds, properties and expression bodies are ignored.
inline std::vector<std::pair<int, std::string>> iet_structure(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto arrow = line.find("|-- ");
    int depth = 0;
    std::string body = line;
    if (arrow != std::string::npos) {
      depth = static_cast<int>((arrow - 1) / 5) + 1;
      body = line.substr(arrow + 4);
    } else if (line.find_first_not_of(" |") == std::string::npos) {
      continue;
    }
    std::string shape;
    if (body.rfind("for ", 0) == 0) {
      shape = "for " + body.substr(4, body.find(' ', 4) - 4);
    } else if (body.rfind("if ", 0) == 0) {
      std::string cond = body.substr(3);
      cond.erase(std::remove(cond.begin(), cond.end(), ' '), cond.end());
      if (!cond.empty() && cond.back() == ':') cond.pop_back();
      shape = "if " + cond;
    } else if (body.rfind("<Eq(", 0) == 0) {
      shape = "eq " + body.substr(4, body.find_first_of("[,", 4) - 4);
    } else {
      shape = body;
    }
    out.emplace_back(depth, shape);
  }
  return out;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// max |a - b| / max |b| over the named buffers.
inline double relative_error(const Buffers& a, const Buffers& b, const std::vector<std::string>& names) {
  double diff = 0, scale = 0;
  for (const auto& n : names) {
    const auto& x = a.at(n);
    const auto& y = b.at(n);
    for (size_t i = 0; i < y.size(); ++i) {
      diff = std::max(diff, std::abs(x.get(i) - y.get(i)));
      scale = std::max(scale, std::abs(y.get(i)));
    }
  }
  return scale > 0 ? diff / scale : diff;
}

inline bool bitwise_equal(const Buffers& a, const Buffers& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [name, x] : a) {
    const auto& y = b.at(name);
    if (x.f64 != y.f64 || x.f32 != y.f32) return false;
  }
  return true;
}

/// Array-form access with integer offsets along the function's dimensions.
inline Expr at(const FunctionPtr& f, std::vector<int64_t> offsets) {
  std::vector<Expr> idx;
  for (size_t d = 0; d < f->dims.size(); ++d)
    idx.push_back(index_of(f->dims[d]) + integer(d < offsets.size() ? offsets[d] : 0));
  return access(f, idx, true);
}

}  // namespace stencil::testing
