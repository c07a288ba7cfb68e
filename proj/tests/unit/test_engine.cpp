#include <doctest.h>

#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "jobprp/engine.hpp"
#include "jobprp/error.hpp"
#include "jobprp/oracle.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

bool arcs_used_once(const PickingGraph& g, const Walk& w) {
  std::set<int> used;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!used.insert(g.arc_between(w[i], w[i + 1])).second) return false;
  }
  return true;
}

SolveConfig quick(CutMode mode) {
  SolveConfig c;
  c.mode = mode;
  c.time_limit = 120.0;
  return c;
}

}  // namespace

TEST_CASE("mode names") {
  CHECK(parse_mode("ibc") == CutMode::Ibc);
  CHECK(parse_mode("FBC") == CutMode::Fbc);
  CHECK(mode_name(CutMode::Fbc) == "fbc");
  CHECK_THROWS_AS(parse_mode("both"), InvalidInput);
  CHECK(status_name(SolveStatus::Optimal) == "optimal");
  CHECK(status_name(SolveStatus::TimeLimit) == "time_limit");
}

TEST_CASE("routing a single vertex is an out-and-back trip") {
  const Instance inst = testing::tiny_instance(1);
  const PickingGraph& g = inst.graph;
  const auto sp = shortest_paths(g, g.origin());
  for (int v : g.location_vertices()) {
    const std::vector<int> req{v};
    const RouteResult r = solve_routing(g, req, 60.0);
    CHECK(r.optimal);
    CHECK(r.length == sp.dist[static_cast<std::size_t>(v)] + sp.dist[static_cast<std::size_t>(v)]);
    CHECK_NOTHROW(check_walk(g, r.walk));
    CHECK(std::find(r.walk.begin(), r.walk.end(), v) != r.walk.end());
  }
  const RouteResult empty = solve_routing(g, {}, 60.0);
  CHECK(empty.walk == Walk{g.origin()});
  CHECK(empty.length == Distance{});
  CHECK(empty.optimal);
}

TEST_CASE("routing agrees with the Held-Karp tour") {
  std::mt19937_64 rng(41);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const PickingGraph& g = inst.graph;
    const auto locs = g.location_vertices();
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<int> req;
      for (int v : locs) {
        if (rng() % 2) req.push_back(v);
      }
      const RouteResult r = solve_routing(g, req, 60.0);
      CHECK(r.optimal);
      CHECK(r.length == held_karp_tour(g, req).length);
      CHECK(walk_length(g, r.walk) == r.length);
      CHECK(arcs_used_once(g, r.walk));
      for (int v : req) CHECK(std::find(r.walk.begin(), r.walk.end(), v) != r.walk.end());
    }
  }
}

TEST_CASE("extracting walks from arc sets") {
  const Instance inst = testing::tiny_instance(2);
  const PickingGraph& g = inst.graph;
  const int s = g.origin();
  const int a = g.artificial(1, 1);
  const int b = g.artificial(2, 1);

  SUBCASE("simple cycle") {
    const std::vector<int> arcs{g.arc_between(s, a), g.arc_between(a, b), g.arc_between(b, s)};
    const Walk w = extract_walk(g, arcs);
    CHECK(w == Walk{s, a, b, s});
  }
  SUBCASE("figure eight through the origin") {
    const std::vector<int> arcs{g.arc_between(s, a), g.arc_between(a, s), g.arc_between(s, b),
                                g.arc_between(b, s)};
    const Walk w = extract_walk(g, arcs);
    CHECK(w.size() == 5);
    CHECK_NOTHROW(check_walk(g, w));
    CHECK(arcs_used_once(g, w));
  }
  SUBCASE("figure eight away from the origin") {
    const int c = g.artificial(3, 1);
    const std::vector<int> arcs{g.arc_between(s, a), g.arc_between(a, b), g.arc_between(b, c),
                                g.arc_between(c, b), g.arc_between(b, s)};
    const Walk w = extract_walk(g, arcs);
    CHECK(w.size() == 6);
    CHECK_NOTHROW(check_walk(g, w));
  }
  SUBCASE("no arcs") { CHECK(extract_walk(g, std::vector<int>{}).empty()); }
  SUBCASE("unbalanced arcs") {
    const std::vector<int> arcs{g.arc_between(s, a), g.arc_between(a, b)};
    CHECK_THROWS(extract_walk(g, arcs));
  }
}

TEST_CASE("both cut modes reach the exhaustive optimum") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    INFO("seed " << seed);
    const Instance inst = testing::tiny_instance(seed);
    const OracleResult opt = oracle_solve(inst);
    for (CutMode mode : {CutMode::Ibc, CutMode::Fbc}) {
      const Solution s = solve_jobprp(inst, quick(mode));
      CHECK(s.status == SolveStatus::Optimal);
      CHECK(s.ub == opt.value);
      CHECK(s.lb == s.ub);
      CHECK(s.flb <= static_cast<double>(s.ub.dm()) + 1e-6);
      CHECK(s.gap() == 0.0);
      CHECK_NOTHROW(check_plan(inst, s.plan));
      CHECK(plan_length(inst.graph, s.plan) == s.ub);
      Distance sum;
      for (const Distance& d : s.lengths) sum += d;
      CHECK(sum == s.ub);
    }
  }
}

TEST_CASE("solves are deterministic") {
  const Instance inst = testing::tiny_instance(7);
  const Solution a = solve_jobprp(inst, quick(CutMode::Fbc));
  const Solution b = solve_jobprp(inst, quick(CutMode::Fbc));
  CHECK(a.ub == b.ub);
  CHECK(a.plan.batches == b.plan.batches);
  CHECK(a.plan.walks == b.plan.walks);
  CHECK(a.nodes == b.nodes);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("a bare model still solves to optimality through cuts") {
  const Instance inst = testing::tiny_instance(4);
  SolveConfig c = quick(CutMode::Ibc);
  c.families = FamilySet::none();
  c.symmetry = false;
  c.heuristic_start = false;
  const Solution s = solve_jobprp(inst, c);
  CHECK(s.ub == oracle_solve(inst).value);
  CHECK(s.rows.at(Family::BaseFlow) == inst.fleet * inst.graph.num_vertices());
  CHECK(s.rows.count(Family::Fcav) == 0);
}

TEST_CASE("no-reversal solutions are never shorter") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    SolveConfig c = quick(CutMode::Ibc);
    c.no_reversal = true;
    const Solution nr = solve_jobprp(inst, c);
    CHECK(nr.status == SolveStatus::Optimal);
    CHECK(nr.ub >= oracle_solve(inst).value);
    CHECK(nr.ub >= no_reversal_bound(inst));
    CHECK_NOTHROW(check_plan(inst, nr.plan));
    CHECK(plan_length(inst.graph, nr.plan) == nr.ub);
  }
}

TEST_CASE("the warm start is used when it is feasible") {
  const Instance inst = testing::tiny_instance(5);
  const OracleResult opt = oracle_solve(inst);
  SolveConfig c = quick(CutMode::Ibc);
  c.warm_start = opt.plan;
  const Solution s = solve_jobprp(inst, c);
  CHECK(s.ub == opt.value);

  Plan too_big = opt.plan;
  too_big.batches.resize(static_cast<std::size_t>(inst.fleet) + 1);
  too_big.walks.resize(static_cast<std::size_t>(inst.fleet) + 1);
  c.warm_start = too_big;
  CHECK_THROWS_AS(solve_jobprp(inst, c), StructuralError);
}

TEST_CASE("infeasible instances") {
  const auto& layout = testing::tiny_layout();
  const auto p = [&](int rank) { return testing::product_at_rank(layout, rank); };
  SUBCASE("fleet too small for the baskets") {
    Instance inst = make_instance(layout, {testing::make_order(1, {p(0)}, 200), testing::make_order(2, {p(9)}, 200)}, 8, 2);
    inst.fleet = 1;
    CHECK_THROWS_AS(solve_jobprp(inst, quick(CutMode::Ibc)), Infeasible);
  }
  SUBCASE("baskets fit in total but cannot be packed") {
    const Instance inst = make_instance(layout,
                                        {testing::make_order(1, {p(0)}, 200), testing::make_order(2, {p(9)}, 200),
                                         testing::make_order(3, {p(40)}, 200)},
                                        8, 2);
    REQUIRE(inst.total_baskets() == 15);
    CHECK_THROWS_AS(solve_jobprp(inst, quick(CutMode::Ibc)), Infeasible);
  }
}

TEST_CASE("plan checks") {
  const Instance inst = testing::tiny_instance(6, {.min_orders = 3, .max_orders = 3, .fixed_fleet = 2});
  const OracleResult opt = oracle_solve(inst);
  CHECK_NOTHROW(check_plan(inst, opt.plan));
  SUBCASE("order left out") {
    Plan p = opt.plan;
    for (auto& b : p.batches) {
      if (!b.empty()) {
        b.pop_back();
        break;
      }
    }
    CHECK_THROWS_AS(check_plan(inst, p), StructuralError);
  }
  SUBCASE("order twice") {
    Plan p = opt.plan;
    p.batches[1] = p.batches[0];
    p.walks[1] = p.walks[0];
    CHECK_THROWS_AS(check_plan(inst, p), StructuralError);
  }
  SUBCASE("walk misses a vertex") {
    Plan p = opt.plan;
    p.walks[0] = {inst.graph.origin(), inst.graph.artificial(1, 1), inst.graph.origin()};
    CHECK_THROWS_AS(check_plan(inst, p), StructuralError);
  }
}

TEST_CASE("solution JSON round trip") {
  const Instance inst = testing::tiny_instance(3);
  const Solution s = solve_jobprp(inst, quick(CutMode::Fbc));
  const nlohmann::json j = s;
  CHECK(j.at("status") == "optimal");
  CHECK(j.at("ub_dm") == s.ub.dm());
  const Solution back = solution_from_json(j, inst);
  CHECK(back.ub == s.ub);
  CHECK(back.lb == s.lb);
  CHECK(back.flb == s.flb);
  CHECK(back.plan.batches == s.plan.batches);
  CHECK(back.plan.walks == s.plan.walks);
  CHECK(back.rows == s.rows);
  CHECK(nlohmann::json(back) == j);

  nlohmann::json broken = j;
  broken["trolleys"][0]["walk"] = {inst.graph.origin(), inst.graph.artificial(3, 3)};
  CHECK_THROWS(solution_from_json(broken, inst));
}

TEST_CASE("CSV rows") {
  CHECK(csv_header() == "instance,T(s),UB,GAP,LB,FGAP,FLB,NS");
  Solution s;
  s.status = SolveStatus::TimeLimit;
  s.seconds = 12.04;
  s.ub = Distance::decimetres(4000);
  s.lb = Distance::decimetres(3600);
  s.flb = 3200.0;
  s.nodes = 17;
  CHECK(s.gap() == doctest::Approx(10.0));
  CHECK(s.fgap() == doctest::Approx(20.0));
  CHECK(csv_row("d5_o5", s) == "d5_o5,12.0,400.0,10.0,360.0,20.0,320.0,17");
  Solution none;
  CHECK(none.gap() == 100.0);
  CHECK(csv_row("x", none).rfind("x,0.0,inf,100.0,", 0) == 0);
}

TEST_CASE("cut log lines") {
  const Instance inst = testing::tiny_instance(4);
  const std::regex line(R"((root|integral) round=\d+ trolley=\d+ size=(\d+) violation=[0-9.e+-]+ members=[\d,]+)");
  for (CutMode mode : {CutMode::Ibc, CutMode::Fbc}) {
    std::ostringstream log;
    SolveConfig c = quick(mode);
    c.families = FamilySet::none();
    c.cut_log = &log;
    const Solution s = solve_jobprp(inst, c);
    std::istringstream in(log.str());
    std::string l;
    int n = 0;
    while (std::getline(in, l)) {
      ++n;
      std::smatch m;
      REQUIRE(std::regex_match(l, m, line));
      CHECK(std::stoi(m[2].str()) >= 2);
      if (mode == CutMode::Ibc) CHECK(m[1].str() == "integral");
    }
    CHECK(n == (s.rows.count(Family::Connectivity) ? s.rows.at(Family::Connectivity) : 0));
  }
}
