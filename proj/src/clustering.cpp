#include "stencil/clustering.hpp"

#include <algorithm>
#include <sstream>

namespace stencil {

std::string Cluster::str() const {
  std::ostringstream os;
  os << "Cluster " << ispace.str();
  for (const auto& g : guards) os << " if(" << g.str() << ")";
  if (!atomics.empty()) {
    os << " atomics{";
    bool first = true;
    for (const auto& a : atomics) {
      os << (first ? "" : ",") << a;
      first = false;
    }
    os << "}";
  }
  for (const auto& e : eqs) os << "\n  " << e.str();
  return os.str();
}

bool same_guards(const std::vector<Guard>& a, const std::vector<Guard>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& g : a)
    if (std::find(b.begin(), b.end(), g) == b.end()) return false;
  return true;
}

std::map<std::string, std::set<Direction>> detect_flow_directions(const std::vector<LoweredEq>& eqs) {
  std::map<std::string, std::set<Direction>> mapper;
  for (const auto& e : eqs)
    for (const auto& it : e.ispace.entries) mapper[it.dim()->name].insert(it.direction);
  // A write in an earlier equation read by a later one: the leading nonzero
  // of (write offset - read offset) fixes the direction of its dimension.
  for (size_t i = 0; i < eqs.size(); ++i) {
    if (!eqs[i].lhs.is_access()) continue;
    for (size_t j = i + 1; j < eqs.size(); ++j) {
      std::vector<std::string> dims;
      for (const auto& it : eqs[i].ispace.entries)
        if (eqs[j].ispace.find(it.dim()->name)) dims.push_back(it.dim()->name);
      for (const auto& r : collect_accesses(eqs[j].rhs)) {
        if (r.name() != eqs[i].lhs.name()) continue;
        auto v = distance_vector(eqs[i].lhs, r, dims);
        if (!v) continue;
        for (size_t k = 0; k < v->size(); ++k) {
          const auto& d = (*v)[k];
          if (!d) break;  // unknown leading entry: no information
          if (*d == 0) continue;
          mapper[dims[k]].insert(*d > 0 ? Direction::Forward : Direction::Backward);
          break;
        }
      }
    }
  }
  return mapper;
}

std::vector<LoweredEq> enforce_directions(const std::vector<LoweredEq>& eqs) {
  auto mapper = detect_flow_directions(eqs);
  std::vector<LoweredEq> out;
  for (const auto& e : eqs) {
    LoweredEq r = e;
    for (auto& it : r.ispace.entries) {
      auto m = mapper.find(it.dim()->name);
      if (m == mapper.end()) continue;
      std::set<Direction> dirs = m->second;
      if (dirs.size() == 1) {
        it.direction = *dirs.begin();
      } else if (dirs.size() == 2 && dirs.count(Direction::Any)) {
        dirs.erase(Direction::Any);
        it.direction = *dirs.begin();
      }
      // Otherwise a genuine clash: keep the equation's own direction.
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

Cluster singleton(const LoweredEq& e) {
  Cluster c;
  c.eqs = {e};
  c.ispace = e.ispace;
  c.guards = e.guards;
  return c;
}

bool blocking(const Dependence& d) { return !d.is_reduction; }

}  // namespace

std::vector<Cluster> group(const std::vector<LoweredEq>& eqs) {
  std::vector<Cluster> clusters;
  for (const auto& e : eqs) {
    bool grouped = false;
    for (auto c = clusters.rbegin(); c != clusters.rend(); ++c) {
      auto deps = get_dependences(c->eqs, {e});
      std::set<std::string> carried_cause;
      for (const auto& d : deps.anti)
        if (d.carried()) carried_cause.insert(d.cause.begin(), d.cause.end());
      for (const auto& d : deps.output)
        if (blocking(d) && d.carried()) carried_cause.insert(d.cause.begin(), d.cause.end());
      bool guards_match = same_guards(c->guards, e.guards);
      if (e.ispace == c->ispace && guards_match && carried_cause.empty()) {
        c->eqs.push_back(e);
        grouped = true;
        break;
      }
      if (!carried_cause.empty()) {
        c->atomics.insert(carried_cause.begin(), carried_cause.end());
        break;
      }
      // Skipping over a cluster reorders e before it, which is only legal
      // when the two are independent (reductions commute).
      auto all = deps.all();
      if (std::any_of(all.begin(), all.end(), blocking)) break;
      if (!guards_match) break;
    }
    if (!grouped) clusters.push_back(singleton(e));
  }
  return apply_control_flow(clusters);
}

std::vector<Cluster> apply_control_flow(const std::vector<Cluster>& clusters) {
  std::vector<Cluster> out;
  for (const auto& c : clusters) {
    Cluster cur;
    bool open = false;
    for (const auto& e : c.eqs) {
      if (open && !same_guards(cur.guards, e.guards)) {
        out.push_back(cur);
        open = false;
      }
      if (!open) {
        cur = Cluster{};
        cur.ispace = c.ispace;
        cur.atomics = c.atomics;
        cur.guards = e.guards;
        open = true;
      }
      cur.eqs.push_back(e);
    }
    if (open) out.push_back(cur);
  }
  return out;
}

std::vector<Cluster> clusterize(const std::vector<LoweredEq>& eqs) { return group(enforce_directions(eqs)); }

std::vector<LoweredEq> flatten(const std::vector<Cluster>& clusters) {
  std::vector<LoweredEq> out;
  for (const auto& c : clusters) out.insert(out.end(), c.eqs.begin(), c.eqs.end());
  return out;
}

}  // namespace stencil
