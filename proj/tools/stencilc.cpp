// stencilc: compile, run and report on a problem file.

#include <bit>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stencil/problem.hpp"
#include "stencil/report.hpp"

using namespace stencil;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Common {
  std::string spec;
  std::string mode;
  std::string block;
  std::string precision;
  int steps = 0;
};

Problem load(const Common& c) {
  Problem p;
  try {
    p = build_problem(parse_spec(read_file(c.spec)), c.steps);
  } catch (const SpecError& e) {
    throw std::runtime_error(c.spec + ":" + std::to_string(e.loc.line) + ":" + std::to_string(e.loc.col) + ": " +
                             e.message);
  }
  if (!c.mode.empty()) p.options.dse.mode = parse_dse_mode(c.mode);
  if (!c.precision.empty()) p.options.precision = parse_precision(c.precision);
  if (c.block == "auto") {
    p.options.autotune = true;
    p.options.block.clear();
  } else if (!c.block.empty()) {
    p.options.autotune = false;
    p.options.block.clear();
    std::stringstream ss(c.block);
    std::string part;
    size_t d = 0;
    while (std::getline(ss, part, 'x')) {
      if (d >= p.grid->ndim()) throw std::runtime_error("--block has more entries than the grid has dimensions");
      int64_t v = std::stoll(part);
      if (v < 1) throw std::runtime_error("--block entries must be >= 1");
      p.options.block[p.grid->dims[d++]->name] = v;
    }
  }
  return p;
}

void dump_buffer(const DataBuffer& b, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "dump format is little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << b.name << " " << to_string(b.precision) << " " << b.extents.size();
  for (auto e : b.extents) out << " " << e;
  out << "\n";
  if (b.precision == Precision::F64)
    out.write(reinterpret_cast<const char*>(b.f64.data()), static_cast<std::streamsize>(b.f64.size() * sizeof(double)));
  else
    out.write(reinterpret_cast<const char*>(b.f32.data()), static_cast<std::streamsize>(b.f32.size() * sizeof(float)));
  if (!out) throw std::runtime_error("failed writing " + path);
}

int cmd_compile(const Common& c, const std::string& emit_path) {
  Problem p = load(c);
  auto op = compile(p.equations, p.options);
  if (!emit_path.empty()) {
    if (emit_path == "-") {
      std::cout << op->source;
    } else {
      std::ofstream out(emit_path);
      if (!out) throw std::runtime_error("cannot write " + emit_path);
      out << op->source;
    }
  }
  if (emit_path != "-") {
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(op->hash));
    std::cout << "operator " << hash << "\n";
    std::cout << "mode " << to_string(p.options.dse.mode) << "\n";
    std::cout << "clusters " << op->clusters.size() << "\n";
    std::cout << "time-loop ops " << time_loop_ops(op->clusters) << "\n";
    std::cout << "sections";
    for (const auto& s : op->sections) std::cout << " " << s;
    std::cout << "\nblock";
    if (op->block.empty()) std::cout << " none";
    for (const auto& [d, s] : op->block) std::cout << " " << d << "=" << s;
    std::cout << "\n";
  }
  return 0;
}

int cmd_run(const Common& c, const std::vector<std::string>& dumps, int workers) {
  Problem p = load(c);
  std::vector<std::pair<std::string, std::string>> targets;
  for (const auto& d : dumps) {
    auto eq = d.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == d.size())
      throw std::runtime_error("--dump expects FUNC=PATH, got '" + d + "'");
    targets.emplace_back(d.substr(0, eq), d.substr(eq + 1));
  }
  auto op = compile(p.equations, p.options);
  auto buffers = op->allocate();
  p.initialize(buffers);
  for (const auto& [f, path] : targets)
    if (!buffers.count(f)) throw std::runtime_error("no function '" + f + "' to dump");
  RunOptions ro;
  ro.workers = workers;
  auto rep = op->apply(buffers, p.params, ro);
  std::cout << "steps " << p.steps << "\n";
  for (const auto& s : rep.sections)
    std::cout << s.name << " points " << s.points << " seconds " << s.seconds << "\n";
  std::cout << "total seconds " << rep.seconds << "\n";
  for (const auto& [f, path] : targets) dump_buffer(buffers.at(f), path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stencil compiler driver"};
  app.require_subcommand(1);

  Common c;
  std::string emit_path;
  std::vector<std::string> dumps;
  int workers = 1;
  bool timings = false;

  auto* compile_cmd = app.add_subcommand("compile", "Compile a problem and optionally emit C");
  compile_cmd->add_option("spec", c.spec, "Problem file")->required();
  compile_cmd->add_option("--mode", c.mode, "basic | advanced | aggressive");
  compile_cmd->add_option("--block", c.block, "auto or NxN[xN]");
  compile_cmd->add_option("--emit-c", emit_path, "Write the C source here ('-' for stdout)");
  compile_cmd->add_option("--precision", c.precision, "f32 | f64");

  auto* run_cmd = app.add_subcommand("run", "Compile and execute a problem");
  run_cmd->add_option("spec", c.spec, "Problem file")->required();
  run_cmd->add_option("--steps", c.steps, "Time steps")->check(CLI::PositiveNumber);
  run_cmd->add_option("--dump", dumps, "FUNC=PATH raw dump after the run");
  run_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--mode", c.mode, "basic | advanced | aggressive");
  run_cmd->add_option("--block", c.block, "auto or NxN[xN]");
  run_cmd->add_option("--precision", c.precision, "f32 | f64");

  auto* report_cmd = app.add_subcommand("report", "Op counts, temporaries and the loop tree");
  report_cmd->add_option("spec", c.spec, "Problem file")->required();
  report_cmd->add_option("--mode", c.mode, "basic | advanced | aggressive");
  report_cmd->add_flag("--timings", timings, "Include per-pass wall times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*compile_cmd) return cmd_compile(c, emit_path);
    if (*run_cmd) return cmd_run(c, dumps, workers);
    if (*report_cmd) {
      Problem p = load(c);
      ReportOptions ro;
      ro.timings = timings;
      std::cout << report(p.equations, p.options, ro);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "stencilc: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
