#include "jobprp/oracle.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "jobprp/error.hpp"

namespace jobprp {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

std::vector<int> batch_vertices(const Instance& inst, unsigned mask) {
  std::set<int> vs;
  for (int o = 0; o < inst.num_orders(); ++o) {
    if (mask & (1u << o)) {
      const auto& ov = inst.order_vertices[static_cast<std::size_t>(o)];
      vs.insert(ov.begin(), ov.end());
    }
  }
  return {vs.begin(), vs.end()};
}

int batch_baskets(const Instance& inst, unsigned mask) {
  int b = 0;
  for (int o = 0; o < inst.num_orders(); ++o) {
    if (mask & (1u << o)) b += inst.orders[static_cast<std::size_t>(o)].baskets;
  }
  return b;
}

void check_limits(const Instance& inst, const OracleLimits& limits) {
  validate(inst);
  if (inst.num_orders() > limits.max_orders) throw LimitExceeded("too many orders for the oracle");
  if (inst.fleet > limits.max_trolleys) throw LimitExceeded("too many trolleys for the oracle");
  const unsigned full = (1u << inst.num_orders()) - 1;
  for (unsigned mask = 1; mask <= full; ++mask) {
    if (batch_baskets(inst, mask) > inst.trolley_capacity) continue;
    if (static_cast<int>(batch_vertices(inst, mask).size()) > limits.max_batch_vertices) {
      throw LimitExceeded("a feasible batch has too many locations for the oracle");
    }
  }
}

// Calls visit(blocks) for every partition of `items` into at most k blocks.
void for_each_partition(const std::vector<int>& items, int k,
                        const std::function<void(const std::vector<unsigned>&)>& visit) {
  std::vector<unsigned> blocks;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == items.size()) {
      visit(blocks);
      return;
    }
    const unsigned bit = 1u << items[i];
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b] |= bit;
      rec(i + 1);
      blocks[b] &= ~bit;
    }
    if (static_cast<int>(blocks.size()) < k) {
      blocks.push_back(bit);
      rec(i + 1);
      blocks.pop_back();
    }
  };
  rec(0);
}

// Best partition value under a per-batch cost; returns the chosen masks.
std::pair<std::int64_t, std::vector<unsigned>> best_partition(
    const Instance& inst, std::optional<std::uint64_t> shuffle_seed,
    const std::function<std::int64_t(unsigned)>& cost) {
  std::vector<int> items(static_cast<std::size_t>(inst.num_orders()));
  std::iota(items.begin(), items.end(), 0);
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    std::shuffle(items.begin(), items.end(), rng);
  }
  std::map<unsigned, std::int64_t> memo;
  std::int64_t best = kInf;
  std::vector<unsigned> best_blocks;
  for_each_partition(items, inst.fleet, [&](const std::vector<unsigned>& blocks) {
    std::int64_t total = 0;
    for (unsigned m : blocks) {
      if (batch_baskets(inst, m) > inst.trolley_capacity) return;
    }
    for (unsigned m : blocks) {
      auto it = memo.find(m);
      if (it == memo.end()) it = memo.emplace(m, cost(m)).first;
      total += it->second;
    }
    if (total < best) {
      best = total;
      best_blocks = blocks;
    }
  });
  if (best >= kInf) throw Infeasible("no capacity-feasible partition");
  return {best, best_blocks};
}

}  // namespace

TourResult held_karp_tour(const PickingGraph& g, std::span<const int> required) {
  const std::set<int> unique(required.begin(), required.end());
  const std::vector<int> req(unique.begin(), unique.end());
  if (req.empty()) return TourResult{Walk{g.origin()}, Distance()};
  std::vector<int> terminals{g.origin()};
  terminals.insert(terminals.end(), req.begin(), req.end());
  const auto d = metric_closure(g, terminals, false);
  const int k = static_cast<int>(req.size());
  const std::size_t states = std::size_t{1} << k;
  std::vector<std::vector<std::int64_t>> dp(states, std::vector<std::int64_t>(static_cast<std::size_t>(k), kInf));
  std::vector<std::vector<int>> parent(states, std::vector<int>(static_cast<std::size_t>(k), -1));
  for (int j = 0; j < k; ++j) dp[std::size_t{1} << j][static_cast<std::size_t>(j)] = d[0][static_cast<std::size_t>(j + 1)].dm();
  for (std::size_t mask = 1; mask < states; ++mask) {
    for (int j = 0; j < k; ++j) {
      const std::int64_t cur = dp[mask][static_cast<std::size_t>(j)];
      if (cur >= kInf) continue;
      for (int n = 0; n < k; ++n) {
        if (mask & (std::size_t{1} << n)) continue;
        const std::size_t next = mask | (std::size_t{1} << n);
        const std::int64_t cand = cur + d[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(n + 1)].dm();
        if (cand < dp[next][static_cast<std::size_t>(n)]) {
          dp[next][static_cast<std::size_t>(n)] = cand;
          parent[next][static_cast<std::size_t>(n)] = j;
        }
      }
    }
  }
  const std::size_t full = states - 1;
  std::int64_t best = kInf;
  int last = -1;
  for (int j = 0; j < k; ++j) {
    const std::int64_t cand = dp[full][static_cast<std::size_t>(j)] + d[static_cast<std::size_t>(j + 1)][0].dm();
    if (cand < best) {
      best = cand;
      last = j;
    }
  }
  std::vector<int> order;
  for (std::size_t mask = full; last != -1;) {
    order.push_back(req[static_cast<std::size_t>(last)]);
    const int prev = parent[mask][static_cast<std::size_t>(last)];
    mask &= ~(std::size_t{1} << last);
    last = prev;
  }
  std::reverse(order.begin(), order.end());
  order.push_back(g.origin());

  Walk walk{g.origin()};
  for (int v : order) {
    const auto path = shortest_paths(g, walk.back(), false).path_to(v);
    walk.insert(walk.end(), path.begin() + 1, path.end());
  }
  walk = make_arc_simple(g, std::move(walk));
  const Distance len = walk_length(g, walk);
  if (len.dm() != best) throw StructuralError("expanded tour length differs from Held-Karp value");
  return TourResult{std::move(walk), len};
}

OracleResult oracle_solve(const Instance& inst, const OracleLimits& limits,
                          std::optional<std::uint64_t> shuffle_seed) {
  check_limits(inst, limits);
  std::map<unsigned, TourResult> tours;
  const auto [best, blocks] = best_partition(inst, shuffle_seed, [&](unsigned mask) {
    TourResult t = held_karp_tour(inst.graph, batch_vertices(inst, mask));
    const std::int64_t len = t.length.dm();
    tours.emplace(mask, std::move(t));
    return len;
  });
  Plan plan;
  for (unsigned m : blocks) {
    std::vector<int> batch;
    for (int o = 0; o < inst.num_orders(); ++o) {
      if (m & (1u << o)) batch.push_back(o);
    }
    plan.batches.push_back(std::move(batch));
    plan.walks.push_back(tours.at(m).walk);
  }
  plan.batches.resize(static_cast<std::size_t>(inst.fleet));
  plan.walks.resize(static_cast<std::size_t>(inst.fleet));
  OracleResult out;
  out.value = Distance::decimetres(best);
  out.plan = canonical_plan(inst, std::move(plan));
  for (const Walk& w : out.plan.walks) out.lengths.push_back(w.empty() ? Distance() : walk_length(inst.graph, w));
  return out;
}

Distance no_reversal_bound(const Instance& inst, const OracleLimits& limits) {
  check_limits(inst, limits);
  const PickingGraph& g = inst.graph;
  std::map<int, ShortestPaths> paths;
  const auto dist = [&](int from, int to) {
    auto it = paths.find(from);
    if (it == paths.end()) it = paths.emplace(from, shortest_paths(g, from, false)).first;
    return it->second.dist[static_cast<std::size_t>(to)].dm();
  };

  const auto batch_cost = [&](unsigned mask) -> std::int64_t {
    std::set<std::pair<int, int>> subs;
    for (int v : batch_vertices(inst, mask)) subs.insert({g.vertex(v).aisle, g.vertex(v).cross});
    const std::vector<std::pair<int, int>> sub(subs.begin(), subs.end());
    const int k = static_cast<int>(sub.size());
    if (k == 0) return 0;
    // ends[i][0] north artificial, ends[i][1] south artificial.
    std::vector<std::array<int, 2>> ends;
    std::vector<std::int64_t> length;
    for (const auto& [a, c] : sub) {
      const int n = g.artificial(a, c);
      const int s = g.artificial(a, c + 1);
      ends.push_back({n, s});
      std::int64_t len = 0;
      int prev = n;
      for (int v : g.subaisle(a, c)) {
        len += g.arc(g.arc_between(prev, v)).length.dm();
        prev = v;
      }
      len += g.arc(g.arc_between(prev, s)).length.dm();
      length.push_back(len);
    }
    // dp[mask][i][e]: traversed `mask`, last subaisle i, standing at end e.
    const std::size_t states = std::size_t{1} << k;
    std::vector<std::vector<std::array<std::int64_t, 2>>> dp(
        states, std::vector<std::array<std::int64_t, 2>>(static_cast<std::size_t>(k), {kInf, kInf}));
    for (int i = 0; i < k; ++i) {
      for (int e = 0; e < 2; ++e) {
        dp[std::size_t{1} << i][static_cast<std::size_t>(i)][static_cast<std::size_t>(1 - e)] =
            dist(g.origin(), ends[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)]) + length[static_cast<std::size_t>(i)];
      }
    }
    for (std::size_t m = 1; m < states; ++m) {
      for (int i = 0; i < k; ++i) {
        for (int e = 0; e < 2; ++e) {
          const std::int64_t cur = dp[m][static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
          if (cur >= kInf) continue;
          const int at = ends[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
          for (int j = 0; j < k; ++j) {
            if (m & (std::size_t{1} << j)) continue;
            for (int f = 0; f < 2; ++f) {
              const std::int64_t cand = cur + dist(at, ends[static_cast<std::size_t>(j)][static_cast<std::size_t>(f)]) +
                                        length[static_cast<std::size_t>(j)];
              auto& slot = dp[m | (std::size_t{1} << j)][static_cast<std::size_t>(j)][static_cast<std::size_t>(1 - f)];
              slot = std::min(slot, cand);
            }
          }
        }
      }
    }
    std::int64_t best = kInf;
    for (int i = 0; i < k; ++i) {
      for (int e = 0; e < 2; ++e) {
        const std::int64_t cur = dp[states - 1][static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
        if (cur < kInf) best = std::min(best, cur + dist(ends[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)], g.origin()));
      }
    }
    return best;
  };
  return Distance::decimetres(best_partition(inst, std::nullopt, batch_cost).first);
}

}  // namespace jobprp
