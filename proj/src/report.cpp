#include "stencil/report.hpp"

#include <cstdarg>
#include <cstdio>
#include <set>
#include <sstream>

namespace stencil {

namespace {

std::string row(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string row(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return std::string(buf) + "\n";
}

std::string space_text(const Cluster& c) {
  std::string s = "[";
  for (size_t i = 0; i < c.ispace.entries.size(); ++i) s += (i ? "," : "") + c.ispace.entries[i].dim()->name;
  s += "]";
  for (const auto& g : c.guards) s += " if " + g.str();
  return s;
}

void cluster_table(std::ostringstream& os, const std::vector<Cluster>& cs) {
  os << row("%-4s %-24s %5s %8s", "#", "ispace", "eqs", "ops");
  for (size_t i = 0; i < cs.size(); ++i)
    os << row("%-4zu %-24s %5zu %8lld", i, space_text(cs[i]).c_str(), cs[i].eqs.size(),
              static_cast<long long>(cluster_ops(cs[i])));
}

}  // namespace

std::string report(const std::vector<Equation>& eqs, const CompileOptions& opts, const ReportOptions& ropts) {
  std::ostringstream os;
  auto op = compile(eqs, opts);
  os << "mode " << to_string(opts.dse.mode) << "\n\n";

  os << "== passes\n";
  os << row("%-18s %8s %12s %10s", "pass", "clusters", "time-ops", "total-ops");
  for (const auto& p : op->passes)
    if (p.measured)
      os << row("%-18s %8zu %12lld %10lld", p.pass.c_str(), p.clusters, static_cast<long long>(p.ops),
                static_cast<long long>(p.total_ops));

  os << "\n== clusters before dse\n";
  cluster_table(os, op->initial);
  os << "\n== clusters after dse\n";
  cluster_table(os, op->clusters);

  os << "\n== modes\n";
  os << row("%-12s %12s %10s", "mode", "time-ops", "footprint");
  for (auto m : {DseMode::Basic, DseMode::Advanced, DseMode::Aggressive}) {
    DseOptions d = opts.dse;
    d.mode = m;
    auto cs = run_dse(op->initial, d);
    os << row("%-12s %12lld %10lld", to_string(m).c_str(), static_cast<long long>(time_loop_ops(cs)),
              static_cast<long long>(temp_footprint(cs)));
  }

  os << "\n== temporaries\n";
  std::set<std::string> seen;
  for (const auto& c : op->clusters)
    for (const auto& e : c.eqs) {
      if (!e.lhs.is_access() || !e.lhs.function()->is_temp() || !seen.insert(e.lhs.name()).second) continue;
      const auto& f = *e.lhs.function();
      std::string shape;
      int64_t n = 1;
      for (size_t d = 0; d < f.ndim(); ++d) {
        shape += (d ? "x" : "") + std::to_string(f.shape[d]);
        n *= f.shape[d];
      }
      os << row("%-10s %-16s %10lld", f.name.c_str(), shape.c_str(), static_cast<long long>(n));
    }
  os << "footprint " << temp_footprint(op->clusters) << " elements\n";

  os << "\n== iet\n" << dump(op->iet);

  if (!op->block.empty()) {
    os << "\nblock";
    for (const auto& [d, s] : op->block) os << " " << d << "=" << s;
    os << "\n";
  }

  if (ropts.timings) {
    os << "\n== timings\n";
    double total = 0;
    for (const auto& p : op->passes) {
      os << row("%-18s %12.6f s", p.pass.c_str(), p.seconds);
      total += p.seconds;
    }
    os << row("%-18s %12.6f s", "total", total);
  }
  return os.str();
}

}  // namespace stencil
