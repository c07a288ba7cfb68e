#include "jobprp/heuristics.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>

#include "jobprp/error.hpp"

namespace jobprp {

namespace {

// Required vertices grouped by subaisle, north to south.
struct PickMap {
  std::map<int, std::map<int, std::vector<int>>> by_block;  // cross -> aisle -> vertices
};

PickMap group_picks(const PickingGraph& g, std::span<const int> required) {
  PickMap pm;
  for (int v : std::set<int>(required.begin(), required.end())) {
    if (v < 0 || v >= g.num_vertices() || !g.is_location(v)) {
      throw InvalidInput("required vertices must be location vertices");
    }
    const Vertex& vx = g.vertex(v);
    pm.by_block[vx.cross][vx.aisle].push_back(v);
  }
  for (auto& [c, aisles] : pm.by_block) {
    for (auto& [a, vs] : aisles) {
      std::sort(vs.begin(), vs.end(), [&](int p, int q) { return g.vertex(p).rank < g.vertex(q).rank; });
    }
  }
  return pm;
}

class WalkBuilder {
 public:
  explicit WalkBuilder(const PickingGraph& g) : g_(g), walk_{g.origin()} {}

  void go(int v) {
    const int cur = walk_.back();
    if (v == cur) return;
    const std::vector<int> path = paths(cur).path_to(v);
    if (path.empty()) throw StructuralError("required vertex unreachable");
    walk_.insert(walk_.end(), path.begin() + 1, path.end());
  }
  void go_all(std::span<const int> vs) {
    for (int v : vs) go(v);
  }
  int position() const { return walk_.back(); }
  Distance distance(int from, int to) { return paths(from).dist[static_cast<std::size_t>(to)]; }

  RouteResult finish() {
    go(g_.origin());
    Walk w = make_arc_simple(g_, std::move(walk_));
    if (w.size() == 1) return RouteResult{w, Distance(), false};
    const Distance len = walk_length(g_, w);
    return RouteResult{std::move(w), len, false};
  }

 private:
  const ShortestPaths& paths(int from) {
    auto it = cache_.find(from);
    if (it == cache_.end()) it = cache_.emplace(from, shortest_paths(g_, from, false)).first;
    return it->second;
  }

  const PickingGraph& g_;
  Walk walk_;
  std::map<int, ShortestPaths> cache_;
};

// Pick aisles of a block in travel order: start from the end nearer `from`.
std::vector<int> travel_order(const std::map<int, std::vector<int>>& aisles, int from) {
  std::vector<int> out;
  for (const auto& [a, vs] : aisles) out.push_back(a);
  if (std::abs(from - out.back()) < std::abs(from - out.front())) std::reverse(out.begin(), out.end());
  return out;
}

// Splits picks (north to south) at the largest gap in the subaisle below
// v(a,c); first part is served from the north end, second from the south.
std::pair<std::vector<int>, std::vector<int>> split_at_gap(const PickingGraph& g, int a, int c,
                                                           const std::vector<int>& picks) {
  std::vector<double> ys{g.vertex(g.artificial(a, c)).y};
  for (int v : picks) ys.push_back(g.vertex(v).y);
  ys.push_back(g.vertex(g.artificial(a, c + 1)).y);
  std::size_t best = 0;
  double widest = -1.0;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    if (ys[i + 1] - ys[i] > widest + 1e-9) {
      widest = ys[i + 1] - ys[i];
      best = i;
    }
  }
  std::vector<int> north(picks.begin(), picks.begin() + static_cast<std::ptrdiff_t>(best));
  std::vector<int> south(picks.begin() + static_cast<std::ptrdiff_t>(best), picks.end());
  return {north, south};
}

std::vector<int> reversed(std::vector<int> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

RouteResult s_shape(const PickingGraph& g, const PickMap& pm) {
  WalkBuilder wb(g);
  int cur = 1;
  for (auto it = pm.by_block.rbegin(); it != pm.by_block.rend(); ++it) {
    const int c = it->first;
    const std::vector<int> order = travel_order(it->second, cur);
    // The farthest block is reached at its front; every later block at its
    // back, which is the front of the block just served.
    bool at_back = it != pm.by_block.rbegin();
    for (int a : order) {
      const auto& picks = it->second.at(a);
      if (at_back) {
        wb.go(g.artificial(a, c + 1));
        wb.go_all(reversed(picks));
        wb.go(g.artificial(a, c));
      } else {
        wb.go(g.artificial(a, c));
        wb.go_all(picks);
        wb.go(g.artificial(a, c + 1));
      }
      at_back = !at_back;
    }
    if (at_back) wb.go(g.artificial(order.back(), c));
    cur = order.back();
  }
  return wb.finish();
}

RouteResult largest_gap(const PickingGraph& g, const PickMap& pm) {
  WalkBuilder wb(g);
  int cur = 1;
  for (auto it = pm.by_block.rbegin(); it != pm.by_block.rend(); ++it) {
    const int c = it->first;
    const std::vector<int> order = travel_order(it->second, cur);
    const int last = order.back();
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const int a = order[i];
      const auto south = split_at_gap(g, a, c, it->second.at(a)).second;
      wb.go(g.artificial(a, c + 1));
      wb.go_all(reversed(south));
      wb.go(g.artificial(a, c + 1));
    }
    wb.go(g.artificial(last, c + 1));
    wb.go_all(reversed(it->second.at(last)));
    wb.go(g.artificial(last, c));
    for (std::size_t i = order.size() - 1; i-- > 0;) {
      const int a = order[i];
      const auto north = split_at_gap(g, a, c, it->second.at(a)).first;
      wb.go(g.artificial(a, c));
      wb.go_all(north);
      wb.go(g.artificial(a, c));
    }
    cur = order.front();
  }
  return wb.finish();
}

// Per block, a two-state program over the pick subaisles: after each one the
// picker stands at the front (0) or back (1) cross-aisle. A subaisle is either
// traversed, or entered and left from the current side. With `free_exit` the
// block may end at either side, priced by the path to the next entry point.
RouteResult combined(const PickingGraph& g, const PickMap& pm, bool free_exit) {
  WalkBuilder wb(g);
  std::vector<int> blocks;
  for (const auto& [c, aisles] : pm.by_block) blocks.push_back(c);
  std::reverse(blocks.begin(), blocks.end());

  int cur = 1;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const int c = blocks[bi];
    const auto& aisles = pm.by_block.at(c);
    const std::vector<int> order = travel_order(aisles, cur);
    const std::size_t k = order.size();
    const auto end_vertex = [&](int a, int side) { return g.artificial(a, side == 0 ? c : c + 1); };
    const auto depth = [&](int a, int side) {
      const auto& picks = aisles.at(a);
      const double y = side == 0 ? g.vertex(picks.back()).y - g.vertex(g.artificial(a, c)).y
                                 : g.vertex(g.artificial(a, c + 1)).y - g.vertex(picks.front()).y;
      return 2.0 * y;
    };
    const auto length = [&](int a) {
      return g.vertex(g.artificial(a, c + 1)).y - g.vertex(g.artificial(a, c)).y;
    };

    // cost[i][s]: best cost after subaisle i ending at side s; choice records
    // (previous side, traversed).
    const double inf = 1e18;
    std::vector<std::array<double, 2>> cost(k, {inf, inf});
    std::vector<std::array<std::pair<int, bool>, 2>> choice(k);
    for (std::size_t i = 0; i < k; ++i) {
      const int a = order[i];
      const double move = i == 0 ? 0.0 : std::abs(g.vertex(end_vertex(a, 0)).x -
                                                  g.vertex(end_vertex(order[i - 1], 0)).x);
      for (int from = 0; from < 2; ++from) {
        const int start = bi == 0 ? 0 : 1;
        const double base = i == 0 ? (from == start ? 0.0 : inf) : cost[i - 1][static_cast<std::size_t>(from)];
        if (base >= inf) continue;
        const double through = base + move + length(a);
        if (through < cost[i][static_cast<std::size_t>(1 - from)] - 1e-9) {
          cost[i][static_cast<std::size_t>(1 - from)] = through;
          choice[i][static_cast<std::size_t>(1 - from)] = {from, true};
        }
        const double back = base + move + depth(a, from);
        if (back < cost[i][static_cast<std::size_t>(from)] - 1e-9) {
          cost[i][static_cast<std::size_t>(from)] = back;
          choice[i][static_cast<std::size_t>(from)] = {from, false};
        }
      }
    }
    // Entry of the next block, or the origin.
    int next_entry = g.origin();
    if (bi + 1 < blocks.size()) {
      const int nc = blocks[bi + 1];
      const int na = travel_order(pm.by_block.at(nc), order.back()).front();
      next_entry = g.artificial(na, nc + 1);
    }
    std::array<double, 2> final_cost{};
    for (int s = 0; s < 2; ++s) {
      const double here = cost[k - 1][static_cast<std::size_t>(s)];
      if (free_exit) {
        final_cost[static_cast<std::size_t>(s)] =
            here + static_cast<double>(wb.distance(end_vertex(order.back(), s), next_entry).dm()) / 10.0;
      } else {
        final_cost[static_cast<std::size_t>(s)] = here + (s == 1 ? length(order.back()) : 0.0);
      }
    }
    int side = final_cost[1] < final_cost[0] - 1e-9 ? 1 : 0;
    const int end_side = side;

    std::vector<std::pair<int, bool>> plan(k);
    for (std::size_t i = k; i-- > 0;) {
      plan[i] = choice[i][static_cast<std::size_t>(side)];
      side = plan[i].first;
    }
    for (std::size_t i = 0; i < k; ++i) {
      const int a = order[i];
      const int from = plan[i].first;
      const auto& picks = aisles.at(a);
      wb.go(end_vertex(a, from));
      wb.go_all(from == 0 ? picks : reversed(picks));
      wb.go(end_vertex(a, plan[i].second ? 1 - from : from));
    }
    if (!free_exit && end_side == 1) wb.go(end_vertex(order.back(), 0));
    cur = order.back();
  }
  return wb.finish();
}

}  // namespace

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::SShape:
      return "s-shape";
    case Estimator::LargestGap:
      return "largest-gap";
    case Estimator::Combined:
      return "combined";
    case Estimator::CombinedPlus:
      return "combined-plus";
    case Estimator::Exact:
      return "exact";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& text) {
  for (Estimator e : {Estimator::SShape, Estimator::LargestGap, Estimator::Combined,
                      Estimator::CombinedPlus, Estimator::Exact}) {
    if (estimator_name(e) == text) return e;
  }
  if (text == "combined+") return Estimator::CombinedPlus;
  throw InvalidInput("unknown estimator '" + text + "'");
}

RouteResult estimate_route(Estimator e, const PickingGraph& g, std::span<const int> required,
                           double exact_time_limit) {
  if (e == Estimator::Exact) return solve_routing(g, required, exact_time_limit);
  if (required.empty()) return RouteResult{Walk{g.origin()}, Distance(), true};
  const PickMap pm = group_picks(g, required);
  switch (e) {
    case Estimator::SShape:
      return s_shape(g, pm);
    case Estimator::LargestGap:
      return largest_gap(g, pm);
    case Estimator::Combined:
      return combined(g, pm, false);
    case Estimator::CombinedPlus:
      return combined(g, pm, true);
    case Estimator::Exact:
      break;
  }
  throw InvalidInput("unknown estimator");
}

RouteResult portfolio_route(const PickingGraph& g, std::span<const int> required,
                            std::span<const Estimator> enabled) {
  if (enabled.empty()) throw InvalidInput("portfolio needs at least one estimator");
  std::optional<RouteResult> best;
  for (Estimator e : enabled) {
    RouteResult r = estimate_route(e, g, required);
    if (!best || r.length < best->length) best = std::move(r);
  }
  return *best;
}

RouteFn memoize(RouteFn route) {
  auto cache = std::make_shared<std::map<std::vector<int>, RouteResult>>();
  return [route = std::move(route), cache](std::span<const int> required) {
    std::vector<int> key(required.begin(), required.end());
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    if (const auto it = cache->find(key); it != cache->end()) return it->second;
    RouteResult r = route(key);
    cache->emplace(std::move(key), r);
    return r;
  };
}

RouteFn portfolio_fn(const PickingGraph& g) {
  return memoize([&g](std::span<const int> required) { return portfolio_route(g, required); });
}

RouteFn exact_fn(const PickingGraph& g, double time_limit) {
  return memoize([&g, time_limit](std::span<const int> required) {
    return solve_routing(g, required, time_limit);
  });
}

std::int64_t SavingsMatrix::saving(int a, int b) const {
  return single[static_cast<std::size_t>(a)].dm() + single[static_cast<std::size_t>(b)].dm() -
         pair[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].dm();
}

namespace {

std::vector<int> union_vertices(const Instance& inst, std::span<const int> orders) {
  std::set<int> vs;
  for (int o : orders) {
    const auto& ov = inst.order_vertices[static_cast<std::size_t>(o)];
    vs.insert(ov.begin(), ov.end());
  }
  return {vs.begin(), vs.end()};
}

}  // namespace

SavingsMatrix savings_matrix(const Instance& inst, const RouteFn& route) {
  const int n = inst.num_orders();
  SavingsMatrix m;
  m.single.resize(static_cast<std::size_t>(n));
  m.pair.assign(static_cast<std::size_t>(n), std::vector<Distance>(static_cast<std::size_t>(n)));
  for (int o = 0; o < n; ++o) {
    const int one[] = {o};
    m.single[static_cast<std::size_t>(o)] = route(union_vertices(inst, one)).length;
  }
  for (int a = 0; a < n; ++a) {
    m.pair[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] = m.single[static_cast<std::size_t>(a)];
    for (int b = a + 1; b < n; ++b) {
      const int two[] = {a, b};
      const Distance d = route(union_vertices(inst, two)).length;
      m.pair[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = d;
      m.pair[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = d;
    }
  }
  return m;
}

std::vector<std::vector<int>> savings_batch(const Instance& inst, const SavingsMatrix& savings) {
  const int n = inst.num_orders();
  std::vector<int> cluster(static_cast<std::size_t>(n));
  std::iota(cluster.begin(), cluster.end(), 0);
  std::vector<int> baskets(static_cast<std::size_t>(n));
  for (int o = 0; o < n; ++o) baskets[static_cast<std::size_t>(o)] = inst.orders[static_cast<std::size_t>(o)].baskets;
  const auto find = [&](int o) {
    while (cluster[static_cast<std::size_t>(o)] != o) o = cluster[static_cast<std::size_t>(o)];
    return o;
  };

  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& p, const auto& q) {
    return savings.saving(p.first, p.second) > savings.saving(q.first, q.second);
  });

  int count = n;
  const auto merge_pass = [&](bool positive_only) {
    for (const auto& [a, b] : pairs) {
      if (!positive_only && count <= inst.fleet) return;
      if (positive_only && savings.saving(a, b) <= 0) return;
      const int ra = find(a);
      const int rb = find(b);
      if (ra == rb) continue;
      if (baskets[static_cast<std::size_t>(ra)] + baskets[static_cast<std::size_t>(rb)] > inst.trolley_capacity) {
        continue;
      }
      const int keep = std::min(ra, rb);
      const int gone = std::max(ra, rb);
      cluster[static_cast<std::size_t>(gone)] = keep;
      baskets[static_cast<std::size_t>(keep)] += baskets[static_cast<std::size_t>(gone)];
      --count;
    }
  };
  merge_pass(true);
  if (count > inst.fleet) merge_pass(false);
  if (count > inst.fleet) {
    throw Infeasible("savings batching needs " + std::to_string(count) + " trolleys but only " +
                     std::to_string(inst.fleet) + " are available");
  }

  std::map<int, std::vector<int>> groups;
  for (int o = 0; o < n; ++o) groups[find(o)].push_back(o);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

std::vector<std::vector<int>> savings_batch(const Instance& inst, const RouteFn& route) {
  return savings_batch(inst, savings_matrix(inst, route));
}

namespace {

Plan route_batches(const Instance& inst, const std::vector<std::vector<int>>& batches,
                   const RouteFn& route) {
  Plan p;
  for (const auto& b : batches) {
    p.batches.push_back(b);
    p.walks.push_back(route(union_vertices(inst, b)).walk);
  }
  return p;
}

}  // namespace

Plan heuristic_plan(const Instance& inst) {
  const RouteFn route = portfolio_fn(inst.graph);
  return route_batches(inst, savings_batch(inst, route), route);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::I:
      return "i";
    case Variant::II:
      return "ii";
    case Variant::III:
      return "iii";
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  if (text == "i") return Variant::I;
  if (text == "ii") return Variant::II;
  if (text == "iii") return Variant::III;
  throw InvalidInput("unknown variant '" + text + "'");
}

Solution run_variant(const Instance& inst, Variant v, double route_time_limit) {
  validate(inst);
  const auto t0 = std::chrono::steady_clock::now();
  const RouteFn heuristic = portfolio_fn(inst.graph);
  const RouteFn exact = exact_fn(inst.graph, route_time_limit);
  const auto batches = savings_batch(inst, v == Variant::III ? exact : heuristic);
  const Plan plan = route_batches(inst, batches, v == Variant::I ? heuristic : exact);

  Solution s;
  s.status = SolveStatus::Heuristic;
  s.plan = canonical_plan(inst, plan);
  s.ub = plan_length(inst.graph, s.plan);
  for (const Walk& w : s.plan.walks) s.lengths.push_back(walk_length(inst.graph, w));
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

RollingResult rolling_k(const Instance& inst, int k, const SolveConfig& config) {
  if (k < 1) throw InvalidInput("K must be at least 1");
  validate(inst);
  std::vector<int> pending(static_cast<std::size_t>(inst.num_orders()));
  std::iota(pending.begin(), pending.end(), 0);
  int fleet = inst.fleet;
  SolveConfig sub_config = config;
  sub_config.warm_start.reset();

  RollingResult out;
  while (!pending.empty()) {
    if (fleet < 1) throw Infeasible("fleet exhausted with orders still pending");
    const std::size_t w = std::min(pending.size(), static_cast<std::size_t>(k));
    const std::vector<int> window(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(w));
    const int sub_fleet = std::min(fleet, static_cast<int>(w));
    const Instance sub = restrict_orders(inst, window, sub_fleet);
    const Solution s = solve_jobprp(sub, sub_config);
    if (!s.has_plan()) throw Error("no solution for a rolling window within the time limit");

    // When every pending order is in the window all trolleys are final.
    std::vector<int> fix;
    if (w == pending.size()) {
      for (std::size_t t = 0; t < s.plan.batches.size(); ++t) {
        if (!s.plan.batches[t].empty()) fix.push_back(static_cast<int>(t));
      }
    } else {
      int best = -1;
      int best_baskets = -1;
      for (std::size_t t = 0; t < s.plan.batches.size(); ++t) {
        int b = 0;
        for (int o : s.plan.batches[t]) b += sub.orders[static_cast<std::size_t>(o)].baskets;
        if (b > best_baskets) {
          best_baskets = b;
          best = static_cast<int>(t);
        }
      }
      fix.push_back(best);
    }

    std::set<int> removed;
    for (int t : fix) {
      RollingStep step;
      step.window = window;
      for (int o : s.plan.batches[static_cast<std::size_t>(t)]) {
        step.fixed.push_back(window[static_cast<std::size_t>(o)]);
        removed.insert(window[static_cast<std::size_t>(o)]);
      }
      std::sort(step.fixed.begin(), step.fixed.end());
      step.walk = lift_walk(sub.graph, s.plan.walks[static_cast<std::size_t>(t)], inst.graph);
      step.length = walk_length(inst.graph, step.walk);
      out.total += step.length;
      out.plan.batches.push_back(step.fixed);
      out.plan.walks.push_back(step.walk);
      out.steps.push_back(std::move(step));
      --fleet;
    }
    std::erase_if(pending, [&](int o) { return removed.contains(o); });
  }
  return out;
}

}  // namespace jobprp
