#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jobprp/engine.hpp"

namespace jobprp {

enum class Estimator { SShape, LargestGap, Combined, CombinedPlus, Exact };
inline constexpr std::array<Estimator, 4> kHeuristicEstimators = {
    Estimator::SShape, Estimator::LargestGap, Estimator::Combined, Estimator::CombinedPlus};

std::string estimator_name(Estimator e);  // "s-shape", "largest-gap", ...
Estimator parse_estimator(const std::string& text);

// Closed walk from the origin through `required` (location vertex ids of g).
// Non-exact estimators chain shortest paths between waypoints, so the walk
// never transits the origin and uses each arc at most once per direction.
RouteResult estimate_route(Estimator e, const PickingGraph& g, std::span<const int> required,
                           double exact_time_limit = 3600.0);
// Shortest walk over the enabled estimators; ties go to the earlier one.
RouteResult portfolio_route(const PickingGraph& g, std::span<const int> required,
                            std::span<const Estimator> enabled = kHeuristicEstimators);

using RouteFn = std::function<RouteResult(std::span<const int>)>;

// Memoised route function over vertex sets.
RouteFn memoize(RouteFn route);
RouteFn portfolio_fn(const PickingGraph& g);
RouteFn exact_fn(const PickingGraph& g, double time_limit = 3600.0);

struct SavingsMatrix {
  std::vector<Distance> single;              // est(o)
  std::vector<std::vector<Distance>> pair;   // est(o1 u o2), symmetric
  std::int64_t saving(int a, int b) const;   // decimetres
};
SavingsMatrix savings_matrix(const Instance& inst, const RouteFn& route);

// Batches of order indices, each ascending, ordered by first order. Throws
// Infeasible when merging cannot bring the batch count down to the fleet.
std::vector<std::vector<int>> savings_batch(const Instance& inst, const SavingsMatrix& savings);
std::vector<std::vector<int>> savings_batch(const Instance& inst, const RouteFn& route);

// Savings batches routed by the estimator portfolio.
Plan heuristic_plan(const Instance& inst);

enum class Variant { I, II, III };
std::string variant_name(Variant v);  // "i", "ii", "iii"
Variant parse_variant(const std::string& text);

// (i) portfolio savings and routes; (ii) the same batches routed exactly;
// (iii) exact savings and routes.
Solution run_variant(const Instance& inst, Variant v, double route_time_limit = 3600.0);

struct RollingStep {
  std::vector<int> window;   // order indices considered
  std::vector<int> fixed;    // orders removed with the fixed trolley
  Walk walk;                 // on inst.graph
  Distance length;
};

struct RollingResult {
  Distance total;
  std::vector<RollingStep> steps;
  Plan plan;  // one trolley per step
};

// Orders arrive in index order. Each round solves the first K pending orders
// with the remaining fleet and fixes the trolley carrying most baskets.
RollingResult rolling_k(const Instance& inst, int k, const SolveConfig& config = {});

}  // namespace jobprp
