#include <doctest.h>

#include <random>

#include "jobprp/error.hpp"
#include "jobprp/heuristics.hpp"
#include "jobprp/oracle.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

constexpr std::array<Estimator, 5> kAll = {Estimator::SShape, Estimator::LargestGap, Estimator::Combined,
                                           Estimator::CombinedPlus, Estimator::Exact};

void check_route(const PickingGraph& g, std::span<const int> required, const RouteResult& r) {
  if (required.empty()) {
    CHECK(r.length == Distance{});
    return;
  }
  CHECK_NOTHROW(check_walk(g, r.walk));
  CHECK(walk_length(g, r.walk) == r.length);
  for (int v : required) CHECK(std::find(r.walk.begin(), r.walk.end(), v) != r.walk.end());
  for (std::size_t i = 1; i + 1 < r.walk.size(); ++i) CHECK(r.walk[i] != g.origin());
}

}  // namespace

TEST_CASE("estimator and variant names") {
  for (Estimator e : kAll) CHECK(parse_estimator(estimator_name(e)) == e);
  CHECK(estimator_name(Estimator::SShape) == "s-shape");
  CHECK(estimator_name(Estimator::LargestGap) == "largest-gap");
  CHECK_THROWS_AS(parse_estimator("midpoint"), InvalidInput);
  for (Variant v : {Variant::I, Variant::II, Variant::III}) CHECK(parse_variant(variant_name(v)) == v);
  CHECK_THROWS_AS(parse_variant("iv"), InvalidInput);
}

TEST_CASE("a single vertex") {
  const Instance inst = testing::tiny_instance(1);
  const PickingGraph& g = inst.graph;
  const auto sp = shortest_paths(g, g.origin(), false);
  for (int v : g.location_vertices()) {
    const std::vector<int> req{v};
    const Distance there_and_back = sp.dist[static_cast<std::size_t>(v)] + sp.dist[static_cast<std::size_t>(v)];
    for (Estimator e : kAll) {
      const RouteResult r = estimate_route(e, g, req, 60.0);
      check_route(g, req, r);
      CHECK(r.length >= there_and_back);
      if (e == Estimator::Exact) CHECK(r.length == there_and_back);
    }
  }
}

TEST_CASE("s-shape on two aisles") {
  const auto layout = testing::small_layout(18, 3, 2, 1);
  // Three slots per side: rank 0 is aisle 1 slot 1, rank 12 aisle 3 slot 1.
  const Instance inst = make_instance(
      layout, {testing::make_order(1, {testing::product_at_rank(layout, 0), testing::product_at_rank(layout, 12)})});
  const auto req = inst.required_vertices();
  const std::vector<int> required(req.begin(), req.end());
  // In at aisle 1 (4 m), through it (6 m), across the back (10 m), back up
  // aisle 3 (6 m) and home (14 m).
  CHECK(estimate_route(Estimator::SShape, inst.graph, required).length == Distance::metres(40.0));
  // The first and last pick aisles are traversed whole, as in s-shape.
  CHECK(estimate_route(Estimator::LargestGap, inst.graph, required).length == Distance::metres(40.0));
  // Out and back into each aisle front: 4 + 4 + 10 + 4 + 14.
  CHECK(estimate_route(Estimator::Exact, inst.graph, required, 60.0).length == Distance::metres(36.0));
  CHECK(estimate_route(Estimator::Combined, inst.graph, required).length == Distance::metres(36.0));
}

TEST_CASE("estimators never beat the exact route and the portfolio takes the best") {
  std::mt19937_64 rng(51);
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const PickingGraph& g = inst.graph;
    const auto locs = g.location_vertices();
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<int> req;
      for (int v : locs) {
        if (rng() % 3 != 0) req.push_back(v);
      }
      if (req.empty()) req.push_back(locs.front());
      INFO("seed " << seed << " trial " << trial);
      const RouteResult exact = estimate_route(Estimator::Exact, g, req, 60.0);
      check_route(g, req, exact);
      Distance best = Distance::infinity();
      for (Estimator e : kHeuristicEstimators) {
        const RouteResult r = estimate_route(e, g, req);
        check_route(g, req, r);
        CHECK(r.length >= exact.length);
        best = std::min(best, r.length);
      }
      const RouteResult port = portfolio_route(g, req);
      CHECK(port.length == best);
      check_route(g, req, port);
      // Fewer estimators can only make the portfolio worse.
      const std::array<Estimator, 2> two{Estimator::SShape, Estimator::LargestGap};
      const std::array<Estimator, 1> one{Estimator::SShape};
      CHECK(portfolio_route(g, req, two).length >= port.length);
      CHECK(portfolio_route(g, req, one).length >= portfolio_route(g, req, two).length);
    }
  }
}

TEST_CASE("memoised routes are computed once per set") {
  const Instance inst = testing::tiny_instance(2);
  int calls = 0;
  const RouteFn counted = [&](std::span<const int> req) {
    ++calls;
    return portfolio_route(inst.graph, req);
  };
  const RouteFn memo = memoize(counted);
  const auto locs = inst.graph.location_vertices();
  const std::vector<int> a{locs.front()};
  const RouteResult first = memo(a);
  const RouteResult second = memo(a);
  CHECK(calls == 1);
  CHECK(first.length == second.length);
  memo(std::vector<int>{locs.back()});
  CHECK(calls == (locs.size() > 1 ? 2 : 1));
}

TEST_CASE("savings batching") {
  const auto& layout = testing::tiny_layout();
  const auto p = [&](int rank) { return testing::product_at_rank(layout, rank); };
  SUBCASE("orders at the same place merge") {
    const Instance inst = make_instance(layout, {testing::make_order(1, {p(40)}), testing::make_order(2, {p(41)})}, 8, 2);
    const SavingsMatrix s = savings_matrix(inst, portfolio_fn(inst.graph));
    CHECK(s.saving(0, 1) > 0);
    CHECK(s.saving(0, 1) == s.saving(1, 0));
    CHECK(savings_batch(inst, s) == std::vector<std::vector<int>>{{0, 1}});
  }
  SUBCASE("full orders never merge") {
    const Instance inst =
        make_instance(layout, {testing::make_order(1, {p(40)}, 200), testing::make_order(2, {p(41)}, 200)}, 8, 2);
    CHECK(savings_batch(inst, portfolio_fn(inst.graph)) == std::vector<std::vector<int>>{{0}, {1}});
  }
  SUBCASE("the fleet forces a merge") {
    const Instance inst = make_instance(
        layout, {testing::make_order(1, {p(0)}), testing::make_order(2, {p(100)}), testing::make_order(3, {p(1)})}, 8, 1);
    const auto batches = savings_batch(inst, portfolio_fn(inst.graph));
    CHECK(batches == std::vector<std::vector<int>>{{0, 1, 2}});
  }
  SUBCASE("no merge can reach the fleet") {
    Instance inst = make_instance(
        layout, {testing::make_order(1, {p(0)}, 200), testing::make_order(2, {p(9)}, 200), testing::make_order(3, {p(40)}, 200)},
        8, 2);
    CHECK_THROWS_AS(savings_batch(inst, portfolio_fn(inst.graph)), Infeasible);
  }
  SUBCASE("batches are capacity feasible and cover every order") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Instance inst = testing::tiny_instance(seed);
      const auto batches = savings_batch(inst, portfolio_fn(inst.graph));
      CHECK(static_cast<int>(batches.size()) <= inst.fleet);
      std::vector<int> seen(static_cast<std::size_t>(inst.num_orders()), 0);
      for (const auto& b : batches) {
        int baskets = 0;
        CHECK(std::is_sorted(b.begin(), b.end()));
        for (int o : b) {
          ++seen[static_cast<std::size_t>(o)];
          baskets += inst.orders[static_cast<std::size_t>(o)].baskets;
        }
        CHECK(baskets <= inst.trolley_capacity);
      }
      for (int n : seen) CHECK(n == 1);
    }
  }
}

TEST_CASE("heuristic variants") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    INFO("seed " << seed);
    const Instance inst = testing::tiny_instance(seed);
    const Distance opt = oracle_solve(inst).value;
    const Solution i = run_variant(inst, Variant::I, 60.0);
    const Solution ii = run_variant(inst, Variant::II, 60.0);
    const Solution iii = run_variant(inst, Variant::III, 60.0);
    for (const Solution* s : {&i, &ii, &iii}) {
      CHECK(s->status == SolveStatus::Heuristic);
      CHECK_NOTHROW(check_plan(inst, s->plan));
      CHECK(plan_length(inst.graph, s->plan) == s->ub);
      CHECK(s->ub >= opt);
    }
    CHECK(ii.ub <= i.ub);
    CHECK(i.plan.batches == ii.plan.batches);
    const Plan hp = heuristic_plan(inst);
    CHECK(plan_length(inst.graph, hp) == i.ub);
  }
}

TEST_CASE("rolling horizon") {
  SUBCASE("a window over all orders is the full optimum") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const Instance inst = testing::tiny_instance(seed);
      const RollingResult r = rolling_k(inst, inst.num_orders());
      CHECK(r.total == oracle_solve(inst).value);
      // One solve fixes every trolley at once.
      std::size_t fixed = 0;
      for (const RollingStep& s : r.steps) {
        CHECK(static_cast<int>(s.window.size()) == inst.num_orders());
        fixed += s.fixed.size();
      }
      CHECK(fixed == static_cast<std::size_t>(inst.num_orders()));
      CHECK(static_cast<int>(r.steps.size()) <= inst.fleet);
    }
  }
  SUBCASE("one order at a time is never better") {
    testing::TinyOptions o;
    o.max_orders = 3;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      o.fixed_fleet = 3;
      const Instance inst = testing::tiny_instance(seed, o);
      const RollingResult one = rolling_k(inst, 1);
      const RollingResult all = rolling_k(inst, inst.num_orders());
      CHECK(one.total >= all.total);
      CHECK(static_cast<int>(one.steps.size()) == inst.num_orders());
      Distance sum;
      for (std::size_t t = 0; t < one.steps.size(); ++t) {
        const RollingStep& s = one.steps[t];
        CHECK(s.window.size() == 1);
        CHECK(s.fixed == s.window);
        CHECK(walk_length(inst.graph, s.walk) == s.length);
        sum += s.length;
      }
      CHECK(sum == one.total);
      CHECK_NOTHROW(check_plan(inst, one.plan));
    }
  }
  SUBCASE("a single trolley cannot serve a window smaller than the orders") {
    const Instance inst = testing::tiny_instance(3, {.min_orders = 3, .max_orders = 3, .fixed_fleet = 1});
    CHECK_THROWS_AS(rolling_k(inst, 1), Infeasible);
  }
  SUBCASE("window size must be positive") {
    CHECK_THROWS_AS(rolling_k(testing::tiny_instance(3), 0), InvalidInput);
  }
}
