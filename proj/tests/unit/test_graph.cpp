#include <doctest.h>

#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "jobprp/error.hpp"
#include "jobprp/graph.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

// Shortest simple-path length between u and v by exhaustive DFS.
std::int64_t brute_distance(const PickingGraph& g, int u, int v, bool transit_origin) {
  std::int64_t best = Distance::infinity().dm();
  std::vector<char> on(static_cast<std::size_t>(g.num_vertices()), 0);
  std::function<void(int, std::int64_t)> dfs = [&](int at, std::int64_t len) {
    if (len >= best) return;
    if (at == v) {
      best = len;
      return;
    }
    if (!transit_origin && at == g.origin() && at != u) return;
    on[static_cast<std::size_t>(at)] = 1;
    for (int e : g.out_arcs(at)) {
      const int h = g.arc(e).head;
      if (!on[static_cast<std::size_t>(h)]) dfs(h, len + g.arc(e).length.dm());
    }
    on[static_cast<std::size_t>(at)] = 0;
  };
  dfs(u, 0);
  return best;
}

std::set<int> random_subset(const std::vector<int>& pool, std::mt19937_64& rng, double p) {
  std::bernoulli_distribution keep(p);
  std::set<int> out;
  for (int v : pool) {
    if (keep(rng)) out.insert(v);
  }
  return out;
}

bool arc_simple(const PickingGraph& g, const Walk& w) {
  std::set<int> used;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!used.insert(g.arc_between(w[i], w[i + 1])).second) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("single aisle, single block graph counts") {
  const auto layout = testing::small_layout(6, 1, 2, 1);
  REQUIRE(layout.slots_per_shelf == 3);
  const PickingGraph g = build_full_graph(layout);
  CHECK(g.num_vertices() == 6);
  CHECK(g.num_arcs() == 10);
  CHECK(g.location_vertices().size() == 3);
}

TEST_CASE("arc lengths follow the layout geometry") {
  const auto layout = testing::small_layout(6, 2, 2, 1);
  const PickingGraph g = build_full_graph(layout);
  const int s = g.origin();
  const int v11 = g.artificial(1, 1);
  const int v21 = g.artificial(2, 1);
  const auto& sub = g.subaisle(1, 1);
  REQUIRE(!sub.empty());
  CHECK(g.arc(g.arc_between(s, v11)).length == Distance::metres(4.0));
  CHECK(g.arc(g.arc_between(s, v21)).length == Distance::metres(4.0 + 5.0));
  CHECK(g.arc(g.arc_between(v11, v21)).length == Distance::metres(5.0));
  CHECK(g.arc(g.arc_between(v11, sub.front())).length == Distance::metres(2.0));
  if (sub.size() >= 2) CHECK(g.arc(g.arc_between(sub[0], sub[1])).length == Distance::metres(1.0));
  CHECK(g.arc(g.arc_between(sub.back(), g.artificial(1, 2))).length == Distance::metres(2.0));
}

TEST_CASE("structural invariants of the full graph") {
  const PickingGraph g = build_full_graph(testing::small_layout(1560, 8, 3, 3));
  CHECK(g.num_vertices() == 1 + 8 * 3 + 8 * 33);
  for (int e = 0; e < g.num_arcs(); ++e) {
    const Arc& a = g.arc(e);
    const Arc& r = g.arc(g.reverse_arc(e));
    CHECK(r.tail == a.head);
    CHECK(r.head == a.tail);
    CHECK(r.length == a.length);
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    const auto deg = g.out_arcs(v).size();
    CHECK(deg == g.in_arcs(v).size());
    if (g.is_location(v)) CHECK(deg == 2);
    if (g.is_artificial(v)) CHECK(deg <= 4);
  }
  CHECK(g.out_arcs(g.origin()).size() == 8);
  for (int e : g.out_arcs(g.origin())) {
    const Vertex& h = g.vertex(g.arc(e).head);
    CHECK(h.kind == VertexKind::Artificial);
    CHECK(h.cross == 1);
  }
}

TEST_CASE("top-left location vertex of the three-aisle, two-shelf layout") {
  const auto layout = testing::small_layout(104, 3, 3, 2);
  const PickingGraph g = build_full_graph(layout);
  const int top_left = g.subaisle(1, 1).front();
  // Slots 1, 2 (west column 1) and 19, 20 (east column 1).
  const std::set<ProductId> expected{testing::product_at_rank(layout, 0), testing::product_at_rank(layout, 1),
                                     testing::product_at_rank(layout, 18), testing::product_at_rank(layout, 19)};
  const auto& products = g.vertex(top_left).products;
  CHECK(std::set<ProductId>(products.begin(), products.end()) == expected);
  CHECK(g.vertex(top_left).rank == 1);
}

TEST_CASE("reduction merges a chain and adds lengths") {
  const PickingGraph full = build_full_graph(testing::small_layout(6, 1, 2, 1));
  const auto& sub = full.subaisle(1, 1);
  REQUIRE(sub.size() == 3);
  std::set<int> keep{sub[0], sub[2]};
  const PickingGraph r = reduce_graph(full, keep);
  CHECK(r.num_vertices() == 5);
  const int u = *r.vertex_by_key(full.vertex(sub[0]).key);
  const int w = *r.vertex_by_key(full.vertex(sub[2]).key);
  const Arc& a = r.arc(r.arc_between(u, w));
  CHECK(a.length == Distance::metres(2.0));
  CHECK(a.hidden == std::vector<std::int64_t>{full.vertex(sub[1]).key});
  CHECK(!r.vertex_by_key(full.vertex(sub[1]).key).has_value());
}

TEST_CASE("removing one slot column drops its vertex") {
  const auto layout = testing::small_layout(104, 3, 3, 2);
  const PickingGraph full = build_full_graph(layout);
  const auto locs = full.location_vertices();
  const int second = full.subaisle(1, 1)[1];
  std::set<int> keep(locs.begin(), locs.end());
  keep.erase(second);
  const PickingGraph r = reduce_graph(full, keep);
  CHECK(r.num_vertices() == full.num_vertices() - 1);
  CHECK(r.num_arcs() == full.num_arcs() - 2);
  const auto& sub = r.subaisle(1, 1);
  CHECK(r.arc(r.arc_between(sub[0], sub[1])).length == Distance::metres(2.0));
}

TEST_CASE("reduction keeping every location is the identity") {
  const PickingGraph full = build_full_graph(testing::tiny_layout());
  const auto locs = full.location_vertices();
  const PickingGraph r = reduce_graph(full, std::set<int>(locs.begin(), locs.end()));
  REQUIRE(r.num_vertices() == full.num_vertices());
  REQUIRE(r.num_arcs() == full.num_arcs());
  for (int e = 0; e < full.num_arcs(); ++e) {
    const Arc& a = full.arc(e);
    const int t = *r.vertex_by_key(full.vertex(a.tail).key);
    const int h = *r.vertex_by_key(full.vertex(a.head).key);
    CHECK(r.arc(r.arc_between(t, h)).length == a.length);
  }
}

TEST_CASE("reduction keeps artificial vertices and the origin") {
  const PickingGraph full = build_full_graph(testing::tiny_layout());
  const PickingGraph r = reduce_graph(full, {});
  CHECK(r.num_vertices() == 1 + 9);
  CHECK(r.location_vertices().empty());
  CHECK(r.first_in_subaisle(1, 1) == r.artificial(1, 2));
  CHECK(r.last_in_subaisle(1, 1) == r.artificial(1, 1));
}

TEST_CASE("reduction preserves distances between retained vertices") {
  const PickingGraph full = build_full_graph(testing::tiny_layout());
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::set<int> keep = random_subset(full.location_vertices(), rng, 0.3);
    const PickingGraph r = reduce_graph(full, keep);
    std::vector<int> before;
    std::vector<int> after;
    for (int v = 0; v < r.num_vertices(); ++v) {
      after.push_back(v);
      before.push_back(*full.vertex_by_key(r.vertex(v).key));
    }
    for (bool transit : {true, false}) {
      CHECK(metric_closure(full, before, transit) == metric_closure(r, after, transit));
    }
  }
}

TEST_CASE("metric closure against exhaustive simple paths") {
  const PickingGraph full = build_full_graph(testing::tiny_layout());
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    // About 20 vertices: origin, 9 artificial, 10 locations.
    auto locs = full.location_vertices();
    std::shuffle(locs.begin(), locs.end(), rng);
    const std::set<int> keep(locs.begin(), locs.begin() + 10);
    const PickingGraph g = reduce_graph(full, keep);
    REQUIRE(g.num_vertices() == 20);
    std::vector<int> all(static_cast<std::size_t>(g.num_vertices()));
    std::iota(all.begin(), all.end(), 0);
    for (bool transit : {true, false}) {
      const auto d = metric_closure(g, all, transit);
      for (int u = 0; u < g.num_vertices(); ++u) {
        for (int v = 0; v < g.num_vertices(); ++v) {
          CHECK(d[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)].dm() == brute_distance(g, u, v, transit));
        }
      }
    }
  }
}

TEST_CASE("shortest paths: adjacent vertices, forced intermediates, origin avoidance") {
  const PickingGraph g = build_full_graph(testing::small_layout(6, 1, 2, 1));
  const auto& sub = g.subaisle(1, 1);
  const auto sp = shortest_paths(g, sub[0]);
  CHECK(sp.dist[static_cast<std::size_t>(sub[1])] == Distance::metres(1.0));
  CHECK(sp.dist[static_cast<std::size_t>(sub[2])] == Distance::metres(2.0));
  CHECK(sp.path_to(sub[2]) == std::vector<int>{sub[0], sub[1], sub[2]});

  const PickingGraph big = build_full_graph(testing::tiny_layout());
  for (int u : big.location_vertices()) {
    const auto paths = shortest_paths(big, u, false);
    for (int v = 0; v < big.num_vertices(); ++v) {
      const auto p = paths.path_to(v);
      for (std::size_t i = 1; i + 1 < p.size(); ++i) CHECK(p[i] != big.origin());
    }
  }
}

TEST_CASE("make_arc_simple removes repeated arcs without lengthening") {
  const PickingGraph g = build_full_graph(testing::tiny_layout());
  std::mt19937_64 rng(5);
  const auto locs = g.location_vertices();
  for (int trial = 0; trial < 100; ++trial) {
    Walk w{g.origin()};
    std::uniform_int_distribution<std::size_t> pick(0, locs.size() - 1);
    const int stops = 2 + trial % 6;
    for (int k = 0; k <= stops; ++k) {
      const int target = k == stops ? g.origin() : locs[pick(rng)];
      const auto path = shortest_paths(g, w.back(), false).path_to(target);
      w.insert(w.end(), path.begin() + 1, path.end());
    }
    const Walk simple = make_arc_simple(g, w);
    CHECK_NOTHROW(check_walk(g, simple));
    CHECK(arc_simple(g, simple));
    CHECK(walk_length(g, simple) <= walk_length(g, w));
    CHECK(std::set<int>(simple.begin(), simple.end()) == std::set<int>(w.begin(), w.end()));
  }
}

TEST_CASE("check_walk rejects broken walks") {
  const PickingGraph g = build_full_graph(testing::small_layout(6, 1, 2, 1));
  const int s = g.origin();
  const int v = g.artificial(1, 1);
  CHECK_NOTHROW(check_walk(g, Walk{s}));
  CHECK_NOTHROW(check_walk(g, Walk{s, v, s}));
  CHECK_THROWS_AS(check_walk(g, Walk{s, v}), StructuralError);
  CHECK_THROWS_AS(check_walk(g, Walk{s, g.artificial(1, 2), s}), StructuralError);
  CHECK_THROWS_AS(check_walk(g, Walk{v, s, v}), StructuralError);
}

TEST_CASE("lifted walks keep their length") {
  const PickingGraph full = build_full_graph(testing::tiny_layout());
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto keep = random_subset(full.location_vertices(), rng, 0.2);
    const PickingGraph r = reduce_graph(full, keep);
    Walk w{r.origin()};
    for (int v : r.location_vertices()) {
      const auto path = shortest_paths(r, w.back(), false).path_to(v);
      w.insert(w.end(), path.begin() + 1, path.end());
    }
    const auto back = shortest_paths(r, w.back(), false).path_to(r.origin());
    w.insert(w.end(), back.begin() + 1, back.end());
    const Walk lifted = lift_walk(r, w, full);
    CHECK_NOTHROW(check_walk(full, lifted));
    CHECK(walk_length(full, lifted) == walk_length(r, w));
  }
}

TEST_CASE("graph JSON round trip and DOT export") {
  const PickingGraph full = build_full_graph(testing::tiny_layout());
  const auto locs = full.location_vertices();
  const PickingGraph g = reduce_graph(full, {locs[0], locs[5], locs[11]});
  const nlohmann::json j = g;
  const auto back = j.get<PickingGraph>();
  REQUIRE(back.num_vertices() == g.num_vertices());
  REQUIRE(back.num_arcs() == g.num_arcs());
  using ArcKey = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::vector<std::int64_t>>;
  const auto arc_set = [](const PickingGraph& h) {
    std::set<ArcKey> out;
    for (const Arc& a : h.arcs()) {
      out.insert({h.vertex(a.tail).key, h.vertex(a.head).key, a.length.dm(), a.hidden});
    }
    return out;
  };
  CHECK(arc_set(back) == arc_set(g));
  CHECK(nlohmann::json(back) == j);
  for (int v = 0; v < g.num_vertices(); ++v) {
    CHECK(back.vertex(v).key == g.vertex(v).key);
    CHECK(back.vertex(v).products == g.vertex(v).products);
  }
  const std::string dot = to_dot(g);
  CHECK(dot.rfind("graph picking {", 0) == 0);
  CHECK(std::count(dot.begin(), dot.end(), '\n') == 3 + g.num_vertices() + g.num_arcs() / 2);
}
