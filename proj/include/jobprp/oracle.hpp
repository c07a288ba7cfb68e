#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "jobprp/graph.hpp"
#include "jobprp/instance.hpp"
#include "jobprp/model.hpp"

namespace jobprp {

struct OracleLimits {
  int max_orders = 6;
  int max_batch_vertices = 13;
  int max_trolleys = 3;
};

struct OracleResult {
  Distance value;
  Plan plan;  // canonical, walks on inst.graph, idle trolleys padded to T
  std::vector<Distance> lengths;
};

// Shortest closed walk from the origin through `required`, by Held-Karp over
// the metric closure. The walk is expanded on g and made arc-simple.
struct TourResult {
  Walk walk;
  Distance length;
};
TourResult held_karp_tour(const PickingGraph& g, std::span<const int> required);

// Exhaustive optimum over all partitions of the orders into at most T
// capacity-feasible batches. With a seed the orders are enumerated in a
// shuffled sequence; the optimum value must not depend on it. Throws
// LimitExceeded before enumerating when the instance is too large.
OracleResult oracle_solve(const Instance& inst, const OracleLimits& limits = {},
                          std::optional<std::uint64_t> shuffle_seed = std::nullopt);

// Lower bound for the no-reversal case: every required subaisle traversed end
// to end, joined by shortest paths. Arcs may repeat, so the bound is exact only
// when the optimal walk it finds is arc-simple.
Distance no_reversal_bound(const Instance& inst, const OracleLimits& limits = {});

}  // namespace jobprp
