#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jobprp/backend.hpp"
#include "jobprp/graph.hpp"
#include "jobprp/instance.hpp"
#include "jobprp/model.hpp"
#include "jobprp/separation.hpp"

namespace jobprp {

enum class CutMode { Ibc, Fbc };
std::string mode_name(CutMode m);  // "ibc" / "fbc"
CutMode parse_mode(const std::string& text);

struct SolveConfig {
  CutMode mode = CutMode::Ibc;
  FamilySet families = FamilySet::all();
  bool symmetry = true;
  bool no_reversal = false;
  double time_limit = 3600.0;  // seconds
  // Used instead of the savings heuristic when present. Walks on inst.graph.
  std::optional<Plan> warm_start;
  bool heuristic_start = true;
  BackendOptions backend_options;
  SeparationConfig separation;
  // One line per emitted connectivity row when set.
  std::ostream* cut_log = nullptr;
};

enum class SolveStatus { Optimal, TimeLimit, Heuristic };
std::string status_name(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Heuristic;
  Plan plan;                      // walks on the instance graph
  std::vector<Distance> lengths;  // per trolley
  Distance ub = Distance::infinity();
  Distance lb;
  double flb = 0.0;  // decimetres
  long long nodes = 0;
  int iterations = 0;
  // Rows of the loaded model by family; Connectivity counts separated rows.
  std::map<Family, int> rows;
  double seconds = 0.0;

  bool has_plan() const { return !ub.is_infinite(); }
  double gap() const;   // percent
  double fgap() const;  // percent
};

// Branch-and-cut on the full model. Throws Infeasible before any backend call
// when the fleet cannot carry the baskets, and after the solve when no packing
// of the orders fits the trolleys.
Solution solve_jobprp(const Instance& inst, const SolveConfig& config = {});

struct RouteResult {
  Walk walk;
  Distance length;
  bool optimal = false;
};

// Optimal closed walk from the origin through every vertex in `required`
// (vertex ids of g). An empty set gives the trivial walk {origin}.
RouteResult solve_routing(const PickingGraph& g, std::span<const int> required,
                          double time_limit = 3600.0);

// Eulerian closed walk from the origin over the listed arcs.
Walk extract_walk(const PickingGraph& g, std::span<const int> arcs);
// Arcs with x > 0.5 for trolley t; empty walk when none is selected.
Walk extract_walk(const PickingGraph& g, const VariableCatalog& cat, int t,
                  std::span<const double> values);

// Total of the walks' lengths; throws when a walk is not a closed walk.
Distance plan_length(const PickingGraph& g, const Plan& plan);

// Checks coverage, capacity and single assignment; throws StructuralError.
void check_plan(const Instance& inst, const Plan& plan);

void to_json(nlohmann::json& j, const Solution& s);
// Batches hold order indices and walks vertex ids of the instance graph.
Solution solution_from_json(const nlohmann::json& j, const Instance& inst);

// instance,T(s),UB,GAP,LB,FGAP,FLB,NS
std::string csv_header();
std::string csv_row(const std::string& name, const Solution& s);

}  // namespace jobprp
