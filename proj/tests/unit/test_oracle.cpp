#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "jobprp/engine.hpp"
#include "jobprp/error.hpp"
#include "jobprp/oracle.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

// Shortest closed walk through `required` by trying every visiting sequence
// over the metric closure.
Distance permutation_tour(const PickingGraph& g, std::vector<int> required) {
  std::vector<int> terminals{g.origin()};
  std::sort(required.begin(), required.end());
  terminals.insert(terminals.end(), required.begin(), required.end());
  const auto d = metric_closure(g, terminals, false);
  std::vector<std::size_t> seq(required.size());
  std::iota(seq.begin(), seq.end(), 1);
  Distance best = Distance::infinity();
  do {
    Distance len = d[0][seq.front()];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) len += d[seq[i]][seq[i + 1]];
    len += d[seq.back()][0];
    best = std::min(best, len);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return best;
}

}  // namespace

TEST_CASE("Held-Karp against every visiting sequence") {
  std::mt19937_64 rng(61);
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const PickingGraph& g = inst.graph;
    auto locs = g.location_vertices();
    std::shuffle(locs.begin(), locs.end(), rng);
    locs.resize(std::min<std::size_t>(locs.size(), 7));
    const TourResult t = held_karp_tour(g, locs);
    CHECK(t.length == permutation_tour(g, locs));
    CHECK_NOTHROW(check_walk(g, t.walk));
    CHECK(walk_length(g, t.walk) == t.length);
    for (int v : locs) CHECK(std::find(t.walk.begin(), t.walk.end(), v) != t.walk.end());
  }
  const Instance inst = testing::tiny_instance(1);
  const TourResult empty = held_karp_tour(inst.graph, {});
  CHECK(empty.length == Distance{});
}

TEST_CASE("one location: out and back") {
  const auto& layout = testing::tiny_layout();
  for (int rank : {0, 17, 50, 103}) {
    const Instance inst = make_instance(layout, {testing::make_order(1, {testing::product_at_rank(layout, rank)})});
    const int v = inst.order_vertices[0][0];
    const auto sp = shortest_paths(inst.graph, inst.graph.origin(), false);
    const OracleResult r = oracle_solve(inst);
    CHECK(r.value == sp.dist[static_cast<std::size_t>(v)] + sp.dist[static_cast<std::size_t>(v)]);
    CHECK(r.lengths.size() == static_cast<std::size_t>(inst.fleet));
  }
}

TEST_CASE("identical orders share one trolley when capacity allows") {
  const auto& layout = testing::tiny_layout();
  const ProductId a = testing::product_at_rank(layout, 7);
  const ProductId b = testing::product_at_rank(layout, 60);
  const Instance one = make_instance(layout, {testing::make_order(1, {a, b})}, 8, 2);
  const Instance two = make_instance(layout, {testing::make_order(1, {a, b}), testing::make_order(2, {a, b})}, 8, 2);
  const OracleResult r1 = oracle_solve(one);
  const OracleResult r2 = oracle_solve(two);
  CHECK(r2.value == r1.value);
  CHECK(r2.plan.batches[0] == std::vector<int>{0, 1});
  CHECK(r2.plan.batches[1].empty());
  CHECK(r2.plan.walks[1].empty());
}

TEST_CASE("the optimum does not depend on enumeration order") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const Distance base = oracle_solve(inst).value;
    for (std::uint64_t shuffle = 1; shuffle <= 3; ++shuffle) CHECK(oracle_solve(inst, {}, shuffle).value == base);
  }
}

TEST_CASE("extra trolleys do not help when one trolley carries everything") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    testing::TinyOptions o;
    o.fixed_fleet = 1;
    o.max_orders = 3;
    const Instance inst = testing::tiny_instance(seed, o);
    if (inst.total_baskets() > inst.trolley_capacity) continue;
    Instance more = inst;
    more.fleet = 3;
    CHECK(oracle_solve(more).value == oracle_solve(inst).value);
  }
}

TEST_CASE("oracle plans are feasible and replay to their value") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const OracleResult r = oracle_solve(inst);
    CHECK_NOTHROW(check_plan(inst, r.plan));
    CHECK(plan_length(inst.graph, r.plan) == r.value);
    REQUIRE(r.lengths.size() == r.plan.walks.size());
    Distance sum;
    for (std::size_t t = 0; t < r.lengths.size(); ++t) {
      const Walk& w = r.plan.walks[t];
      CHECK(r.lengths[t] == (w.empty() ? Distance{} : walk_length(inst.graph, w)));
      sum += r.lengths[t];
    }
    CHECK(sum == r.value);
    CHECK(canonical_plan(inst, r.plan).batches == r.plan.batches);
  }
}

TEST_CASE("no-reversal bound") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    CHECK(no_reversal_bound(inst) >= oracle_solve(inst).value);
  }
  // A single pick in one subaisle: down the whole subaisle and back up it
  // again, 4 + 6 + 6 + 4. Turning round at the far end is not a reversal.
  const auto layout = testing::small_layout(18, 3, 2, 1);
  const Instance inst = make_instance(layout, {testing::make_order(1, {testing::product_at_rank(layout, 0)})});
  CHECK(no_reversal_bound(inst) == Distance::metres(20.0));
  // Picking straight out and back costs 4 + 2 + 2 + 4.
  CHECK(oracle_solve(inst).value == Distance::metres(12.0));
}

TEST_CASE("limits are enforced before enumerating") {
  const Instance inst = testing::tiny_instance(2);
  OracleLimits tight;
  tight.max_orders = inst.num_orders() - 1;
  CHECK_THROWS_AS(oracle_solve(inst, tight), LimitExceeded);
  tight = {};
  tight.max_trolleys = inst.fleet - 1;
  if (tight.max_trolleys >= 0) CHECK_THROWS_AS(oracle_solve(inst, tight), LimitExceeded);
  tight = {};
  tight.max_batch_vertices = 1;
  if (inst.required_vertices().size() > 1) CHECK_THROWS_AS(oracle_solve(inst, tight), LimitExceeded);
}
