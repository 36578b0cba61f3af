#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stencil/operator.hpp"

namespace stencil {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

/// Diagnostic with a 1-based location; what() reads "line L, col C: message".
class SpecError : public std::runtime_error {
 public:
  SpecError(SourceLoc loc, const std::string& message);
  SourceLoc loc;
  std::string message;
};

/// Expression syntax as written in a problem file.
struct SpecExpr {
  enum class Kind { Number, Name, Neg, Add, Sub, Mul, Div, Pow, Call, Suffix };
  Kind kind = Kind::Number;
  /// Literal text, identifier, callee or suffix name.
  std::string text;
  std::vector<SpecExpr> args;
  SourceLoc loc;
};
bool operator==(const SpecExpr& a, const SpecExpr& b);
inline bool operator!=(const SpecExpr& a, const SpecExpr& b) { return !(a == b); }

struct GridSpec {
  bool present = false;
  std::vector<int64_t> shape;
  std::vector<double> extent;
  std::vector<double> origin;
  SourceLoc loc;
};

struct FunctionSpec {
  std::string kind;  // function | timefunction | sparsetimefunction
  std::string name;
  int space_order = 2;
  int time_order = 2;
  int save = 0;
  /// Sub-sampling factor of a saved time function (0: every step).
  int factor = 0;
  int padding = 0;
  int npoint = 0;
  /// Time samples of a sparse function (0: steps + 1).
  int nt = 0;
  std::vector<std::vector<double>> coordinates;
  SourceLoc loc;
};

struct StatementSpec {
  enum class Kind { Eq, Inject, Interpolate };
  Kind kind = Kind::Eq;
  SpecExpr lhs;
  SpecExpr rhs;
  bool interior = false;
  /// Sparse function of inject/interpolate.
  std::string target;
  /// inject: field and expr; interpolate: expr.
  SpecExpr field;
  SpecExpr expr;
  SourceLoc loc;
};

struct InitSpec {
  std::string name;
  std::string how;  // const | random | ricker
  double value = 0;
  double scale = 1;
  SourceLoc loc;
};

struct ProblemSpec {
  GridSpec grid;
  std::vector<FunctionSpec> functions;
  std::vector<StatementSpec> statements;
  /// `param key=value` lines in order.
  std::vector<std::pair<std::string, std::string>> params;
  /// `subs name = expr`: replaces a scalar symbol before compilation.
  std::vector<std::pair<std::string, SpecExpr>> subs;
  std::vector<InitSpec> inits;
};
bool operator==(const ProblemSpec& a, const ProblemSpec& b);

ProblemSpec parse_spec(const std::string& text);
/// Canonical text; parse_spec(print_spec(s)) == s.
std::string print_spec(const ProblemSpec& spec);
std::string print_expr(const SpecExpr& e);

/// A ready-to-compile problem.
struct Problem {
  GridPtr grid;
  std::map<std::string, FunctionPtr> functions;
  std::vector<Equation> equations;
  /// Scalars and loop bounds (t_m, t_M from the step count).
  Params params;
  int steps = 10;
  CompileOptions options;
  std::vector<InitSpec> inits;

  /// Apply the init lines to freshly allocated buffers.
  void initialize(Buffers& buffers) const;
};

/// Instantiate a parsed spec. `steps` > 0 overrides the file's step count.
Problem build_problem(const ProblemSpec& spec, int steps = 0);

// ---- benchmark problems ----------------------------------------------------------

/// Spec text of the acoustic wave equation with a point source and, when
/// `sparse` is set, two receivers.
std::string acoustic_spec(int ndim, int64_t n, int space_order, int steps, bool sparse = true);
/// Sub-sampled snapshotting example: u, us saved every 4 steps, one source.
std::string running_example_spec();
/// Anisotropic (rotated Laplacian) wave equation in direct form; first
/// derivatives use half the space order.
Problem tti_problem(int ndim, int64_t n, int space_order, int steps);

}  // namespace stencil
