// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "stencil/problem.hpp"
#include "stencil/report.hpp"
#include "support.hpp"

using namespace stencil;
using namespace stencil::testing;

namespace {

// Pinned tolerances and sizes.
constexpr double kOracleTol = 1e-12;
constexpr double kOracleBudgetSeconds = 60.0;
constexpr int kOracleSteps = 50;
constexpr int kAliasFamilies = 1000;
constexpr int kDependenceCases = 500;
constexpr double kAutotuneSlack = 1.05;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

BlockShape uniform_block(const IetPtr& analyzed, int64_t size) {
  BlockShape s;
  for (const auto& d : blockable_dims(analyzed)) s[d] = size;
  return s;
}

const DseMode kModes[] = {DseMode::Basic, DseMode::Advanced, DseMode::Aggressive};

// ---- 1 -------------------------------------------------------------------------------

Outcome oracle_matrix() {
  Outcome o;
  auto t0 = Clock::now();
  double worst = 0;
  int cases = 0;
  const std::pair<int, int64_t> sizes[] = {{1, 256}, {2, 64}, {3, 24}};
  for (auto [nd, n] : sizes)
    for (int so : {2, 4, 8}) {
      Problem p = build_problem(parse_spec(acoustic_spec(nd, n, so, kOracleSteps)));
      auto low = lower(p.equations);
      auto ref = allocate_buffers(functions_of(low));
      p.initialize(ref);
      reference_run(low, ref, p.params);
      for (auto mode : kModes)
        for (bool blocked : {false, true}) {
          CompileOptions opts;
          opts.dse.mode = mode;
          if (blocked) opts.block = uniform_block(analyze_iet(build_iet(run_dse(clusterize(low), opts.dse))), 8);
          auto op = compile(p.equations, opts);
          auto buf = op->allocate();
          p.initialize(buf);
          op->apply(buf, p.params);
          double err = relative_error(buf, ref, {"u", "rec"});
          worst = std::max(worst, err);
          ++cases;
          if (!(err <= kOracleTol)) {
            char msg[160];
            std::snprintf(msg, sizeof(msg), "%dD so=%d %s%s rel=%.3g", nd, so, to_string(mode).c_str(),
                          blocked ? " blocked" : "", err);
            o.fail(msg);
          }
        }
    }
  double secs = since(t0);
  if (secs >= kOracleBudgetSeconds) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) {
    char msg[160];
    std::snprintf(msg, sizeof(msg), "%d cases, worst rel %.2e <= %.0e, %.1f s", cases, worst, kOracleTol, secs);
    o.detail = msg;
  }
  return o;
}

// ---- 2 -------------------------------------------------------------------------------

Outcome golden_pipeline() {
  Outcome o;
  Problem p = build_problem(parse_spec(running_example_spec()));
  auto clusters = clusterize(lower(p.equations));
  if (clusters.size() != 3) {
    o.fail(std::to_string(clusters.size()) + " clusters");
    return o;
  }
  const char* want[] = {"[t[0,0]+, x[0,0]*]", "[t[0,0]+, x[0,0]*]", "[t[0,0]+, p_q[0,0]*]"};
  for (size_t i = 0; i < 3; ++i)
    if (clusters[i].ispace.str() != want[i]) o.fail("cluster " + std::to_string(i) + " ispace " + clusters[i].ispace.str());
  if (!clusters[0].guards.empty() || !clusters[2].guards.empty()) o.fail("unexpected guard");
  if (clusters[1].guards.size() != 1 || clusters[1].guards[0].str() != "t%4 == 0") o.fail("missing t%4 guard");
  auto got = iet_structure(dump(build_iet(clusters)));
  auto golden = iet_structure(read_text(std::string(STENCIL_GOLDEN_DIR) + "/running_example_iet.txt"));
  if (golden.empty()) o.fail("golden file missing");
  if (got != golden) o.fail("IET structure differs from the golden tree");
  if (o.pass) o.detail = "3 clusters, IET matches golden (" + std::to_string(got.size()) + " nodes)";
  return o;
}

// ---- 3 -------------------------------------------------------------------------------

Outcome local_analysis() {
  Outcome o;
  Problem p = build_problem(parse_spec(running_example_spec()));
  auto low = lower(p.equations);
  const auto& st = low[0];
  if (st.ispace.str() != "[t[0,0]+, x[0,0]*]") o.fail("ispace " + st.ispace.str());
  const auto& s = st.dspace.summary;
  if (s.size() != 2 || s[0].name() != "t" || s[0].lower != 0 || s[0].upper != 1 || s[1].name() != "x" ||
      s[1].lower != 0 || s[1].upper != 0)
    o.fail("dspace " + st.dspace.str());

  // Default t_M: derived from the data spaces, never out of bounds.
  Params open = p.params;
  open.erase(upper_symbol("t"));
  try {
    auto op = compile(p.equations);
    auto buf = op->allocate();
    p.initialize(buf);
    auto rep = op->apply(buf, open);
    auto ref = allocate_buffers(functions_of(low));
    p.initialize(ref);
    reference_run(low, ref, open);
    if (rep.params.at(upper_symbol("t")) != 99) o.fail("default t_M = " + std::to_string(rep.params.at("t_M")));
    if (relative_error(buf, ref, {"u", "us"}) > kOracleTol) o.fail("default-bound run disagrees with oracle");
  } catch (const std::out_of_range& e) {
    o.fail(std::string("bounds checker fired: ") + e.what());
  }
  if (o.pass) o.detail = "ISpace " + st.ispace.str() + ", DSpace " + st.dspace.str() + ", default t_M=99 in bounds";
  return o;
}

// ---- 4 -------------------------------------------------------------------------------

Outcome alias_classification() {
  Outcome o;
  auto g = Grid::make({12});
  auto u = make_function("u", g), v = make_function("v", g), w = make_function("w", g);
  // v over a different dimension, for the dimension-vector example.
  auto vy_decl = std::make_shared<FunctionDecl>(*v);
  vy_decl->dims = {make_space_dim("y", "h_y")};
  FunctionPtr vy = vy_decl;

  Expr e = at(u, {0}) + at(v, {0});
  struct Case {
    Expr expr;
    AliasVerdict want;
  } cases[] = {
      {at(u, {-1}) + at(vy, {-1}), AliasVerdict::DifferentDimensions},
      {at(u, {0}) + at(w, {0}), AliasVerdict::DifferentLabel},
      {at(u, {2}) + at(v, {0}), AliasVerdict::NoTranslation},
      {at(u, {2}) + at(v, {2}), AliasVerdict::Alias},
  };
  for (const auto& c : cases) {
    auto got = classify_alias(c.expr, e);
    if (got != c.want) o.fail(c.expr.str() + ": " + to_string(got) + ", expected " + to_string(c.want));
    if (classify_alias(e, c.expr) != got) o.fail(c.expr.str() + ": verdict not symmetric");
  }

  // Random translated families over a 2D grid.
  auto g2 = Grid::make({16, 16});
  std::vector<FunctionPtr> fns = {make_function("a", g2, 4), make_function("b", g2, 4), make_function("c", g2, 4)};
  std::mt19937 rng(2024);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto random_expr = [&]() {
    std::vector<Expr> terms;
    int nterms = pick(2, 3);
    for (int k = 0; k < nterms; ++k) {
      std::vector<Expr> f = {integer(pick(1, 3))};
      int nf = pick(1, 2);
      for (int q = 0; q < nf; ++q) f.push_back(at(fns[static_cast<size_t>(pick(0, 2))], {pick(-2, 2), pick(-2, 2)}));
      terms.push_back(mul(f));
    }
    return add(terms);
  };
  const auto& x = g2->dims[0]->name;
  const auto& y = g2->dims[1]->name;
  int checked = 0;
  for (int fam = 0; fam < kAliasFamilies && o.pass; ++fam) {
    Expr base = random_expr();
    std::vector<Expr> members = {base};
    for (int k = 0; k < 3; ++k) members.push_back(translate(base, {{x, pick(-3, 3)}, {y, pick(-3, 3)}}));
    std::vector<Expr> all = members;
    all.push_back(random_expr());
    // One operand moved on its own: no common translation unless it cancels.
    all.push_back(transform(base, [&, done = false](const Expr& n) mutable -> Expr {
      if (done || !n.is_access()) return n;
      done = true;
      return translate(n, {{x, 1}});
    }));
    for (const auto& m : members)
      for (const auto& n : members)
        if (!is_alias(m, n)) o.fail("translated members not aliases: " + m.str() + " / " + n.str());
    for (size_t i = 0; i < all.size(); ++i) {
      if (!is_alias(all[i], all[i])) o.fail("not reflexive: " + all[i].str());
      for (size_t j = 0; j < all.size(); ++j) {
        bool ij = is_alias(all[i], all[j]);
        if (ij != is_alias(all[j], all[i])) o.fail("not symmetric: " + all[i].str() + " / " + all[j].str());
        for (size_t k = 0; k < all.size(); ++k)
          if (ij && is_alias(all[j], all[k]) && !is_alias(all[i], all[k]))
            o.fail("not transitive: " + all[i].str() + " / " + all[k].str());
      }
    }
    // The detector must put every family member in one class.
    auto groups = detect_aliases(members);
    size_t biggest = 0;
    for (const auto& gr : groups) biggest = std::max(biggest, gr.members.size());
    std::set<std::string> distinct;
    for (const auto& m : members) distinct.insert(m.str());
    if (biggest != distinct.size()) o.fail("family split across alias groups");
    ++checked;
  }
  if (o.pass) o.detail = "4 examples as stated, " + std::to_string(checked) + " random families";
  return o;
}

// ---- 5 -------------------------------------------------------------------------------

Outcome op_count_trend() {
  Outcome o;
  std::map<int, std::map<DseMode, int64_t>> ops;
  for (int so : {4, 8, 12, 16}) {
    Problem p = tti_problem(2, 2 * so + 8, so, 4);
    auto clusters = clusterize(lower(p.equations));
    for (auto mode : kModes) {
      DseOptions d;
      d.mode = mode;
      ops[so][mode] = time_loop_ops(run_dse(clusters, d));
    }
    auto& r = ops[so];
    if (!(r[DseMode::Aggressive] <= r[DseMode::Advanced] && r[DseMode::Advanced] <= r[DseMode::Basic]))
      o.fail("so=" + std::to_string(so) + " not monotone");
  }
  double basic = static_cast<double>(ops[16][DseMode::Basic]) / static_cast<double>(ops[4][DseMode::Basic]);
  double aggr = static_cast<double>(ops[16][DseMode::Aggressive]) / static_cast<double>(ops[4][DseMode::Aggressive]);
  if (!(basic > aggr)) o.fail("basic growth " + std::to_string(basic) + " <= aggressive growth " + std::to_string(aggr));
  std::ostringstream os;
  for (int so : {4, 8, 12, 16})
    os << "so" << so << "=" << ops[so][DseMode::Basic] << "/" << ops[so][DseMode::Advanced] << "/"
       << ops[so][DseMode::Aggressive] << " ";
  char ratio[96];
  std::snprintf(ratio, sizeof(ratio), "growth basic %.2f > aggressive %.2f", basic, aggr);
  o.detail = (o.pass ? "" : o.detail + " | ") + os.str() + ratio;
  return o;
}

// ---- 6 -------------------------------------------------------------------------------

struct Instance {
  int eq;
  bool write;
  std::map<std::string, int64_t> iter;
};

Outcome dependence_soundness() {
  Outcome o;
  std::mt19937 rng(99);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int64_t pairs = 0;
  for (int cs = 0; cs < kDependenceCases && o.pass; ++cs) {
    bool timed = cs % 2 == 1;
    auto g = Grid::make({10});
    const auto& xd = g->dims[0];
    std::vector<FunctionPtr> fns;
    const char* names[] = {"a", "b", "c"};
    for (const char* n : names) {
      if (timed) {
        FunctionOptions fo;
        fo.space_order = 4;
        fo.save = 8;
        fns.push_back(make_time_function(n, g, fo));
      } else {
        fns.push_back(make_function(n, g, 4));
      }
    }
    auto ref = [&](const FunctionPtr& f) {
      Expr e = access(f);
      if (timed) e = shift(e, g->time, pick(-1, 1));
      return shift(e, xd, pick(-2, 2));
    };
    std::vector<Equation> eqs;
    int neq = pick(1, 3);
    for (int k = 0; k < neq; ++k) {
      Expr lhs = ref(fns[static_cast<size_t>(pick(0, 2))]);
      std::vector<Expr> rhs;
      int nr = pick(1, 3);
      for (int r = 0; r < nr; ++r) rhs.push_back(ref(fns[static_cast<size_t>(pick(0, 2))]));
      if (pick(0, 4) == 0) {
        Equation e = make_eq(lhs, lhs + add(rhs));
        e.is_increment = true;
        eqs.push_back(e);
      } else {
        eqs.push_back(make_eq(lhs, add(rhs)));
      }
    }
    auto low = lower(eqs);
    auto deps = all_dependences(low);

    // Execute the fused nest: t outer (if any), x inner, statements in order,
    // reads before the write within a statement.
    std::map<std::string, std::vector<Instance>> touched;
    auto element = [&](const Expr& a, const std::map<std::string, int64_t>& it) {
      std::string key = a.name();
      for (const auto& idx : a.operands()) {
        auto ai = affine_index(idx);
        int64_t v = ai.offset + (ai.var.empty() ? 0 : ai.coeff.as_integer() * it.at(ai.var));
        key += "," + std::to_string(v);
      }
      return key;
    };
    std::vector<int64_t> ts = timed ? std::vector<int64_t>{2, 3, 4} : std::vector<int64_t>{0};
    for (auto t : ts)
      for (int64_t xv = 0; xv < 10; ++xv) {
        std::map<std::string, int64_t> it = {{"x", xv}};
        if (timed) it["t"] = t;
        for (const auto& le : low) {
          for (const auto& a : collect_accesses(le.rhs)) touched[element(a, it)].push_back({le.id, false, it});
          touched[element(le.lhs, it)].push_back({le.id, true, it});
        }
      }
    for (const auto& [key, list] : touched)
      for (size_t i = 0; i < list.size(); ++i)
        for (size_t j = i + 1; j < list.size(); ++j) {
          const auto& A = list[i];
          const auto& B = list[j];
          if (!A.write && !B.write) continue;
          ++pairs;
          DepKind kind = A.write && B.write ? DepKind::Output : (A.write ? DepKind::Flow : DepKind::Anti);
          std::string fn = key.substr(0, key.find(','));
          bool found = false;
          for (const auto& d : deps) {
            if (d.kind != kind || d.source != A.eq || d.sink != B.eq || d.function != fn) continue;
            bool match = true;
            for (size_t k = 0; k < d.dims.size() && match; ++k)
              if (d.distance[k] && *d.distance[k] != B.iter.at(d.dims[k]) - A.iter.at(d.dims[k])) match = false;
            if (match) {
              found = true;
              break;
            }
          }
          if (!found) {
            o.fail("case " + std::to_string(cs) + ": missed " + to_string(kind) + " on " + key + " from eq " +
                   std::to_string(A.eq) + " to eq " + std::to_string(B.eq));
            break;
          }
        }
  }
  if (o.pass)
    o.detail = std::to_string(kDependenceCases) + " programs, " + std::to_string(pairs) + " dynamic pairs, no misses";
  return o;
}

// ---- 7 -------------------------------------------------------------------------------

Outcome parallelism() {
  Outcome o;
  Problem p3 = build_problem(parse_spec(acoustic_spec(3, 16, 4, 4)));
  auto iet = analyze_iet(build_iet(clusterize(lower(p3.equations))));
  for (const auto& it : iterations(iet)) {
    const auto& d = it->dim->name;
    if (d == "t" && !it->has(LoopProperty::Sequential)) o.fail("t not sequential");
    if ((d == "x" || d == "y" || d == "z") && !it->has(LoopProperty::Parallel)) o.fail(d + " not parallel");
  }
  int runs = 0;
  std::vector<Problem> corpus;
  corpus.push_back(build_problem(parse_spec(acoustic_spec(1, 128, 8, 10))));
  corpus.push_back(build_problem(parse_spec(acoustic_spec(2, 40, 4, 10))));
  corpus.push_back(build_problem(parse_spec(acoustic_spec(3, 20, 4, 10))));
  corpus.push_back(tti_problem(2, 40, 8, 10));
  corpus.push_back(tti_problem(3, 16, 4, 6));
  for (const auto& p : corpus)
    for (auto mode : kModes)
      for (bool blocked : {false, true}) {
        CompileOptions opts;
        opts.dse.mode = mode;
        auto op = compile(p.equations, opts);
        if (blocked) {
          opts.block = uniform_block(analyze_iet(build_iet(op->clusters)), 8);
          op = compile(p.equations, opts);
        }
        auto one = op->allocate(), four = op->allocate();
        p.initialize(one);
        p.initialize(four);
        RunOptions r1, r4;
        r4.workers = 4;
        op->apply(one, p.params, r1);
        op->apply(four, p.params, r4);
        ++runs;
        if (!bitwise_equal(one, four)) o.fail(to_string(mode) + (blocked ? " blocked" : "") + ": 4 workers differ");
      }
  if (o.pass) o.detail = "t sequential, x/y/z parallel; " + std::to_string(runs) + " runs bit-identical at 1 and 4 workers";
  return o;
}

// ---- 8 -------------------------------------------------------------------------------

std::vector<std::string> visits(const IetPtr& iet, const Problem& p) {
  Buffers b = allocate_buffers(functions_of(lower(p.equations)));
  p.initialize(b);
  RunOptions ro;
  ro.trace = true;
  auto rep = run(add_sections(place_declarations(iet)), b, p.params, ro);
  std::vector<std::string> out;
  for (const auto& v : rep.trace) {
    std::string s = std::to_string(v.eq);
    for (const auto& [d, x] : v.point) s += " " + d + "=" + std::to_string(x);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome blocking_preservation() {
  Outcome o;
  std::string spec =
      "grid shape=(17, 23)\n"
      "function m\n"
      "timefunction u\n"
      "timefunction v space_order=4\n"
      "param dt=0.1\nparam steps=3\n"
      "init m const=1.0\n"
      "eq u.forward = u + 1\n"
      "eq v.forward = solve(m*v.dt2 - v.laplace, v.forward) region=interior\n";
  Problem p = build_problem(parse_spec(spec));
  BlockShape shape = {{"x", 5}, {"y", 7}};
  size_t total = 0;
  for (auto mode : kModes) {
    DseOptions d;
    d.mode = mode;
    auto iet = analyze_iet(build_iet(run_dse(clusterize(lower(p.equations)), d)));
    auto before = visits(iet, p);
    auto after = visits(block_loops(iet, shape), p);
    if (before != after) o.fail(to_string(mode) + ": visited multiset changed");
    total += before.size();
  }
  // Fused producer/consumer nests with a cross-derivative.
  Problem t = tti_problem(2, 17, 4, 2);
  DseOptions d;
  d.mode = DseMode::Aggressive;
  auto iet = analyze_iet(build_iet(run_dse(clusterize(lower(t.equations)), d)));
  auto before = visits(iet, t);
  if (before != visits(block_loops(iet, shape), t)) o.fail("fused nest: visited multiset changed");
  total += before.size();
  if (o.pass) o.detail = "17x23 with 5x7 blocks, " + std::to_string(total) + " statement instances identical";
  return o;
}

// ---- 9 -------------------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  std::vector<std::vector<Equation>> programs = {build_problem(parse_spec(running_example_spec())).equations,
                                                 build_problem(parse_spec(acoustic_spec(3, 16, 8, 4))).equations,
                                                 tti_problem(3, 16, 8, 4).equations};
  int emitted = 0;
  for (const auto& eqs : programs)
    for (auto mode : kModes)
      for (bool blocked : {false, true}) {
        CompileOptions opts;
        opts.dse.mode = mode;
        if (blocked) opts.block = {{"x", 8}, {"y", 8}};
        auto a = compile(eqs, opts), b = compile(eqs, opts);
        if (a->source != b->source) o.fail("emit_c differs across compiles");
        if (a->hash != b->hash) o.fail("hash differs across compiles");
        if (report(eqs, opts) != report(eqs, opts)) o.fail("report differs across runs");
        ++emitted;
      }
  OperatorCache cache;
  auto eqs = programs[1];
  CompileOptions opts;
  opts.dse.mode = DseMode::Aggressive;
  auto first = cache.compile(eqs, opts);
  int64_t first_work = cache.last_pass_work();
  auto second = cache.compile(eqs, opts);
  if (cache.hits() != 1 || cache.misses() != 1) o.fail("expected one miss then one hit");
  if (cache.last_pass_work() != 0) o.fail("pass work on hit = " + std::to_string(cache.last_pass_work()));
  if (first.get() != second.get()) o.fail("hit returned a different operator");
  if (first_work == 0) o.fail("miss did no pass work");
  opts.dse.mode = DseMode::Basic;
  cache.compile(eqs, opts);
  if (cache.misses() != 2) o.fail("different mode hit the cache");
  if (o.pass)
    o.detail = std::to_string(emitted) + " operators emitted twice identically; cache hit with pass-work 0 (miss: " +
               std::to_string(first_work) + ")";
  return o;
}

// ---- 10 ------------------------------------------------------------------------------

Outcome autotuner() {
  Outcome o;
  Problem p = build_problem(parse_spec(acoustic_spec(2, 96, 8, 6, false)));
  auto iet = analyze_iet(build_iet(run_dse(clusterize(lower(p.equations)), {})));
  auto candidates = default_block_candidates(iet);
  std::map<std::string, double> measured;
  auto key = [](const IetPtr& blocked) {
    std::string k;
    for (const auto& it : iterations(blocked))
      if (it->dim->kind == DimKind::Block) k += it->dim->name + std::to_string(it->step) + " ";
    return k;
  };
  auto runner = [&](const IetPtr& blocked) {
    auto prepared = add_sections(place_declarations(blocked));
    std::vector<double> t;
    for (int rep = 0; rep < 3; ++rep) {
      auto b = allocate_buffers(functions_of(lower(p.equations)));
      p.initialize(b);
      t.push_back(run(prepared, b, p.params).seconds);
    }
    std::sort(t.begin(), t.end());
    measured[key(blocked)] = t[1];
    return t[1];
  };
  auto chosen = autotune_blocks(iet, runner, candidates);
  double best = 1e300;
  for (const auto& [k, v] : measured) best = std::min(best, v);
  double got = measured.at(key(block_loops(iet, chosen)));
  if (!(got <= kAutotuneSlack * best)) o.fail("chosen " + std::to_string(got) + " s vs best " + std::to_string(best));

  // A deterministic cost model must be minimized exactly.
  auto model = [](const IetPtr& blocked) {
    double c = 0;
    for (const auto& it : iterations(blocked))
      if (it->dim->kind == DimKind::Block) c += std::abs(static_cast<double>(it->step) - 16.0);
    return c;
  };
  auto pick = autotune_blocks(iet, model, candidates);
  for (const auto& [d, s] : pick)
    if (s != 16) o.fail("cost model minimum not found");
  if (o.pass) {
    char msg[160];
    std::string shape;
    for (const auto& [d, s] : chosen) shape += d + "=" + std::to_string(s) + " ";
    std::snprintf(msg, sizeof(msg), "%zu candidates, chosen %s%.4f s <= %.2f x best %.4f s", candidates.size(),
                  shape.c_str(), got, kAutotuneSlack, best);
    o.detail = msg;
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence matrix", oracle_matrix},
      {"running example clusters and IET", golden_pipeline},
      {"local analysis and default bounds", local_analysis},
      {"alias classification", alias_classification},
      {"op-count trend", op_count_trend},
      {"dependence soundness", dependence_soundness},
      {"parallelism classification", parallelism},
      {"blocking preserves iteration set", blocking_preservation},
      {"determinism and operator cache", determinism},
      {"autotuner consistency", autotuner},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    char head[96];
    std::snprintf(head, sizeof(head), "criterion %2zu %-4s %-36s (%5.1f s) ", i + 1, o.pass ? "PASS" : "FAIL",
                  criteria[i].first, since(t0));
    std::cout << head << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
