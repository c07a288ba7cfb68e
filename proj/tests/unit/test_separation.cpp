#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "jobprp/model.hpp"
#include "jobprp/oracle.hpp"
#include "jobprp/separation.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

// Minimum s-t cut capacity by enumerating every source side.
std::int64_t brute_min_cut(const FlowNetwork& net) {
  const int n = net.num_vertices;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!(mask >> net.source & 1u) || (mask >> net.sink & 1u)) continue;
    std::int64_t cap = 0;
    for (const FlowArc& a : net.arcs) {
      if ((mask >> a.from & 1u) && !(mask >> a.to & 1u)) cap += a.capacity;
    }
    best = std::min(best, cap);
  }
  return best;
}

std::int64_t cut_capacity(const FlowNetwork& net, const std::vector<char>& side) {
  std::int64_t cap = 0;
  for (const FlowArc& a : net.arcs) {
    if (side[static_cast<std::size_t>(a.from)] && !side[static_cast<std::size_t>(a.to)]) cap += a.capacity;
  }
  return cap;
}

FlowNetwork random_network(std::mt19937_64& rng, int n, double density) {
  FlowNetwork net;
  net.num_vertices = n;
  net.source = 0;
  net.sink = n - 1;
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<std::int64_t> cap(0, 20);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u != v && keep(rng)) net.arcs.push_back({u, v, cap(rng)});
    }
  }
  return net;
}

// Components of the undirected x > 0.5 support avoiding the origin, by DFS.
std::set<std::vector<int>> dfs_components(const PickingGraph& g, const VariableCatalog& cat, int t,
                                          const std::vector<double>& values) {
  const int n = g.num_vertices();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  std::vector<char> active(static_cast<std::size_t>(n), 0);
  for (int e = 0; e < g.num_arcs(); ++e) {
    if (values[static_cast<std::size_t>(cat.x[t][e])] > 0.5) {
      adj[static_cast<std::size_t>(g.arc(e).tail)].push_back(g.arc(e).head);
      adj[static_cast<std::size_t>(g.arc(e).head)].push_back(g.arc(e).tail);
      active[static_cast<std::size_t>(g.arc(e).tail)] = 1;
      active[static_cast<std::size_t>(g.arc(e).head)] = 1;
    }
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::set<std::vector<int>> out;
  for (int v = 0; v < n; ++v) {
    if (seen[static_cast<std::size_t>(v)] || !active[static_cast<std::size_t>(v)]) continue;
    std::vector<int> comp;
    std::vector<int> stack{v};
    seen[static_cast<std::size_t>(v)] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int w : adj[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    if (!std::binary_search(comp.begin(), comp.end(), g.origin())) out.insert(comp);
  }
  return out;
}

void set_var(std::vector<double>& values, int var, double v) { values[static_cast<std::size_t>(var)] = v; }

}  // namespace

TEST_CASE("max flow on small networks") {
  FlowNetwork one{2, {{0, 1, 3}}, 0, 1};
  CHECK(max_flow(one).value == 3);

  FlowNetwork diamond{4, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 3, 1}, {1, 2, 5}}, 0, 3};
  const auto r = max_flow(diamond);
  CHECK(r.value == 2);
  CHECK(r.source_side[0]);
  CHECK_FALSE(r.source_side[3]);

  FlowNetwork cut_off{3, {{0, 1, 4}, {2, 1, 4}}, 0, 2};
  const auto c = max_flow(cut_off);
  CHECK(c.value == 0);
  CHECK(c.source_side == std::vector<char>{1, 1, 0});

  FlowNetwork parallel{2, {{0, 1, 2}, {0, 1, 5}, {1, 0, 9}}, 0, 1};
  CHECK(max_flow(parallel).value == 7);
}

TEST_CASE("max flow equals the exhaustive minimum cut") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const FlowNetwork net = random_network(rng, n, 0.2 + 0.1 * static_cast<double>(trial % 6));
    const auto r = max_flow(net);
    INFO("trial " << trial);
    CHECK(r.value == brute_min_cut(net));
    CHECK(cut_capacity(net, r.source_side) == r.value);
    CHECK(r.source_side[static_cast<std::size_t>(net.source)]);
    CHECK_FALSE(r.source_side[static_cast<std::size_t>(net.sink)]);
  }
}

TEST_CASE("max flow does not depend on vertex or arc order") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const FlowNetwork net = random_network(rng, n, 0.35);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    FlowNetwork p;
    p.num_vertices = n;
    p.source = perm[static_cast<std::size_t>(net.source)];
    p.sink = perm[static_cast<std::size_t>(net.sink)];
    for (const FlowArc& a : net.arcs) {
      p.arcs.push_back({perm[static_cast<std::size_t>(a.from)], perm[static_cast<std::size_t>(a.to)], a.capacity});
    }
    std::shuffle(p.arcs.begin(), p.arcs.end(), rng);
    CHECK(max_flow(p).value == max_flow(net).value);
  }
}

TEST_CASE("integral components match a depth-first search") {
  std::mt19937_64 rng(33);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const ModelSpec m = build_base_model(inst);
    const PickingGraph& g = inst.graph;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> values(m.vars.size(), 0.0);
      std::bernoulli_distribution on(0.2);
      for (int e = 0; e < g.num_arcs(); ++e) set_var(values, m.cat.x[0][e], on(rng) ? 1.0 : 0.0);
      const auto comps = integral_components(g, m.cat, 0, values);
      std::set<std::vector<int>> got;
      for (const Component& c : comps) {
        CHECK(std::is_sorted(c.members.begin(), c.members.end()));
        CHECK(c.representative == c.members.front());
        got.insert(c.members);
      }
      CHECK(got == dfs_components(g, m.cat, 0, values));
    }
  }
}

TEST_CASE("a tour through the origin plus a detached cycle") {
  const auto layout = testing::small_layout(6, 2, 3, 1);
  const Instance inst = make_instance(layout, {testing::make_order(1, {testing::product_at_rank(layout, 0)})});
  const PickingGraph& g = inst.graph;
  const ModelSpec m = build_base_model(inst);
  std::vector<double> values(m.vars.size(), 0.0);
  const auto walk = [&](std::initializer_list<int> vs) {
    const std::vector<int> w(vs);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) set_var(values, m.cat.x[0][g.arc_between(w[i], w[i + 1])], 1.0);
  };
  walk({g.origin(), g.artificial(1, 1), g.origin()});
  const int a = g.artificial(1, 3);
  const int b = g.artificial(2, 3);
  const int c = g.artificial(2, 2);
  const int d = g.artificial(1, 2);
  // Subaisles (1,2) and (2,2) are empty, so the four corners form a cycle.
  REQUIRE(g.subaisle(1, 2).empty());
  REQUIRE(g.subaisle(2, 2).empty());
  walk({a, b, c, d, a});
  const auto comps = integral_components(g, m.cat, 0, values);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].members.size() == 4);
}

TEST_CASE("fractional two-cycle yields one cut") {
  const Instance inst = testing::tiny_instance(3);
  const PickingGraph& g = inst.graph;
  const ModelSpec m = build_base_model(inst);
  const int i = g.artificial(1, 1);
  const int j = g.artificial(2, 1);
  std::vector<double> values(m.vars.size(), 0.0);
  set_var(values, m.cat.x[0][g.arc_between(i, j)], 0.5);
  set_var(values, m.cat.x[0][g.arc_between(j, i)], 0.5);
  for (int v : {i, j}) {
    set_var(values, m.cat.y[0][v], 0.5);
    set_var(values, m.cat.g[0][v], 0.5);
  }
  const auto cuts = separate_fractional(g, m.cat, 0, values);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0].set.members == std::vector<int>{std::min(i, j), std::max(i, j)});
  CHECK(cuts[0].violation == doctest::Approx(0.5));
  CHECK(cuts[0].trolley == 0);
  CHECK(row_violation(cuts[0].row, values) == doctest::Approx(0.5));

  // Linking the pair to the origin removes the violation.
  set_var(values, m.cat.x[0][g.arc_between(g.origin(), i)], 0.5);
  set_var(values, m.cat.x[0][g.arc_between(i, g.origin())], 0.5);
  set_var(values, m.cat.g[0][i], 1.0);
  CHECK(separate_fractional(g, m.cat, 0, values).empty());
}

TEST_CASE("feasible plans are never cut") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    INFO("seed " << seed);
    const Instance inst = testing::tiny_instance(seed);
    const OracleResult opt = oracle_solve(inst);
    const ModelSpec m = build_base_model(inst);
    const auto values = encode_plan(m, inst, opt.plan);
    for (int t = 0; t < inst.fleet; ++t) {
      CHECK(integral_components(inst.graph, m.cat, t, values).empty());
      CHECK(separate_fractional(inst.graph, m.cat, t, values).empty());
    }
  }
}

TEST_CASE("cuts found at random fractional points are valid for optimal plans") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const PickingGraph& g = inst.graph;
    const ModelSpec m = build_base_model(inst);
    const auto feasible = encode_plan(m, inst, oracle_solve(inst).plan);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> values(m.vars.size(), 0.0);
      for (int e = 0; e < g.num_arcs(); ++e) {
        if (unit(rng) < 0.3) set_var(values, m.cat.x[0][e], unit(rng));
      }
      for (int v = 0; v < g.num_vertices(); ++v) {
        double out = 0.0;
        for (int e : g.out_arcs(v)) out += values[static_cast<std::size_t>(m.cat.x[0][e])];
        set_var(values, m.cat.g[0][v], out);
        set_var(values, m.cat.y[0][v], std::min(1.0, out + 0.2 * unit(rng)));
      }
      for (const Cut& c : separate_fractional(g, m.cat, 0, values)) {
        ++total;
        CHECK(c.violation > 1e-6);
        CHECK(c.set.members.size() >= 2);
        CHECK_FALSE(std::binary_search(c.set.members.begin(), c.set.members.end(), g.origin()));
        CHECK(row_violation(c.row, feasible) == 0.0);
      }
    }
  }
  CHECK(total > 0);
}

TEST_CASE("no cut is rooted inside an earlier cut of the same round") {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Instance inst = testing::tiny_instance(6);
  const PickingGraph& g = inst.graph;
  const ModelSpec m = build_base_model(inst);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(m.vars.size(), 0.0);
    for (int e = 0; e < g.num_arcs(); ++e) {
      if (g.arc(e).tail != g.origin() && g.arc(e).head != g.origin() && unit(rng) < 0.5) {
        set_var(values, m.cat.x[0][e], 0.5);
      }
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
      double out = 0.0;
      for (int e : g.out_arcs(v)) out += values[static_cast<std::size_t>(m.cat.x[0][e])];
      set_var(values, m.cat.g[0][v], out);
      set_var(values, m.cat.y[0][v], std::min(1.0, out));
    }
    std::set<int> covered;
    for (const Cut& c : separate_fractional(g, m.cat, 0, values)) {
      CHECK_FALSE(covered.count(c.set.representative));
      CHECK(std::binary_search(c.set.members.begin(), c.set.members.end(), c.set.representative));
      covered.insert(c.set.members.begin(), c.set.members.end());
    }
  }
}

TEST_CASE("cut pool") {
  const Instance inst = testing::tiny_instance(3);
  const PickingGraph& g = inst.graph;
  const ModelSpec m = build_base_model(inst);
  const int i = g.artificial(1, 1);
  const int j = g.artificial(2, 1);
  const int k = g.artificial(3, 1);

  CutPool pool(2);
  CHECK(pool.capacity() == 2);
  const Component ij{{std::min(i, j), std::max(i, j)}, std::min(i, j)};
  const Component jk{{std::min(j, k), std::max(j, k)}, std::min(j, k)};
  const Component ik{{std::min(i, k), std::max(i, k)}, std::min(i, k)};
  CHECK(pool.insert(ij));
  CHECK_FALSE(pool.insert(ij));
  CHECK(pool.insert(jk));
  CHECK(pool.size() == 2);
  CHECK_FALSE(pool.insert(ij));  // refreshes ij, so jk is now the oldest
  CHECK(pool.insert(ik));
  CHECK(pool.size() == 2);
  CHECK(pool.insert(jk));

  // Trolley 1 sits on the i-k pair only; the pooled sets are checked for it.
  CutPool reuse;
  reuse.insert(ij);
  reuse.insert(ik);
  std::vector<double> values(m.vars.size(), 0.0);
  const int t = inst.fleet - 1;
  set_var(values, m.cat.x[static_cast<std::size_t>(t)][g.arc_between(i, j)], 1.0);
  set_var(values, m.cat.x[static_cast<std::size_t>(t)][g.arc_between(j, i)], 1.0);
  set_var(values, m.cat.y[static_cast<std::size_t>(t)][i], 0.4);
  set_var(values, m.cat.y[static_cast<std::size_t>(t)][j], 1.0);
  set_var(values, m.cat.g[static_cast<std::size_t>(t)][i], 1.0);
  set_var(values, m.cat.g[static_cast<std::size_t>(t)][j], 1.0);
  const auto hits = reuse.violated(g, m.cat, t, values, 1e-6);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].set.members == ij.members);
  CHECK(hits[0].set.representative == j);
  CHECK(hits[0].violation == doctest::Approx(1.0));
  CHECK(reuse.violated(g, m.cat, t, std::vector<double>(m.vars.size(), 0.0), 1e-6).empty());
}
