#include "jobprp/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "jobprp/error.hpp"
#include "jobprp/heuristics.hpp"

namespace jobprp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

Plan pad_plan(Plan plan, int trolleys) {
  if (static_cast<int>(plan.batches.size()) > trolleys) {
    throw InvalidInput("warm start uses more trolleys than the fleet");
  }
  plan.batches.resize(static_cast<std::size_t>(trolleys));
  plan.walks.resize(static_cast<std::size_t>(trolleys));
  return plan;
}

// Connectivity rows violated at `values`, pooled sets first.
std::vector<Cut> separate(const PickingGraph& g, const VariableCatalog& cat, CutPool& pool,
                          std::span<const double> values, bool fractional,
                          const SeparationConfig& config) {
  std::vector<Cut> out;
  for (int t = 0; t < cat.trolleys; ++t) {
    std::set<std::vector<int>> seen;
    for (Cut& c : pool.violated(g, cat, t, values, config.epsilon)) {
      seen.insert(c.set.members);
      out.push_back(std::move(c));
    }
    if (fractional) {
      for (Cut& c : separate_fractional(g, cat, t, values, config)) {
        if (seen.insert(c.set.members).second) out.push_back(std::move(c));
      }
      continue;
    }
    for (Component& comp : integral_components(g, cat, t, values)) {
      if (!seen.insert(comp.members).second) continue;
      ConstraintRow row = connectivity_row(cat, g, t, comp.members, comp.representative);
      const double violation = row_violation(row, values);
      if (violation <= config.epsilon) continue;
      out.push_back(Cut{t, std::move(comp), std::move(row), violation});
    }
  }
  return out;
}

Plan plan_from_values(const Instance& inst, const Instance& work,
                      const std::optional<CollapsedInstance>& collapsed, const VariableCatalog& cat,
                      std::span<const double> values) {
  Plan p;
  for (int t = 0; t < cat.trolleys; ++t) {
    std::vector<int> batch;
    for (int o = 0; o < inst.num_orders(); ++o) {
      if (values[static_cast<std::size_t>(cat.z[o][t])] > 0.5) batch.push_back(o);
    }
    Walk w = extract_walk(work.graph, cat, t, values);
    if (collapsed && !w.empty()) w = expand_collapsed_walk(*collapsed, inst, w);
    p.batches.push_back(std::move(batch));
    p.walks.push_back(std::move(w));
  }
  return p;
}

}  // namespace

std::string mode_name(CutMode m) { return m == CutMode::Ibc ? "ibc" : "fbc"; }

CutMode parse_mode(const std::string& text) {
  if (text == "ibc" || text == "IBC") return CutMode::Ibc;
  if (text == "fbc" || text == "FBC") return CutMode::Fbc;
  throw InvalidInput("unknown mode '" + text + "'");
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::TimeLimit:
      return "time_limit";
    case SolveStatus::Heuristic:
      return "heuristic";
  }
  return "unknown";
}

double Solution::gap() const {
  if (!has_plan()) return 100.0;
  if (ub.dm() == 0) return 0.0;
  return 100.0 * static_cast<double>(ub.dm() - lb.dm()) / static_cast<double>(ub.dm());
}

double Solution::fgap() const {
  if (!has_plan()) return 100.0;
  if (ub.dm() == 0) return 0.0;
  return 100.0 * (static_cast<double>(ub.dm()) - flb) / static_cast<double>(ub.dm());
}

Walk extract_walk(const PickingGraph& g, std::span<const int> arcs) {
  if (arcs.empty()) return {};
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<std::vector<int>> out(n);
  std::vector<int> balance(n, 0);
  std::vector<int> sorted(arcs.begin(), arcs.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw StructuralError("arc selected twice");
  }
  for (int e : sorted) {
    const Arc& a = g.arc(e);
    out[static_cast<std::size_t>(a.tail)].push_back(a.head);
    ++balance[static_cast<std::size_t>(a.tail)];
    --balance[static_cast<std::size_t>(a.head)];
  }
  for (int b : balance) {
    if (b != 0) throw StructuralError("selected arcs are not balanced");
  }
  const int s = g.origin();
  if (out[static_cast<std::size_t>(s)].empty()) throw StructuralError("selected arcs miss the origin");

  std::vector<std::size_t> next(n, 0);
  std::vector<int> stack{s};
  Walk circuit;
  while (!stack.empty()) {
    const int v = stack.back();
    auto& adj = out[static_cast<std::size_t>(v)];
    if (next[static_cast<std::size_t>(v)] < adj.size()) {
      stack.push_back(adj[next[static_cast<std::size_t>(v)]++]);
    } else {
      circuit.push_back(v);
      stack.pop_back();
    }
  }
  if (circuit.size() != sorted.size() + 1) throw StructuralError("selected arcs are disconnected");
  std::reverse(circuit.begin(), circuit.end());
  return circuit;
}

Walk extract_walk(const PickingGraph& g, const VariableCatalog& cat, int t,
                  std::span<const double> values) {
  std::vector<int> arcs;
  for (int e = 0; e < g.num_arcs(); ++e) {
    if (values[static_cast<std::size_t>(cat.x[t][e])] > 0.5) arcs.push_back(e);
  }
  return extract_walk(g, arcs);
}

Distance plan_length(const PickingGraph& g, const Plan& plan) {
  Distance total;
  for (const Walk& w : plan.walks) {
    if (w.empty()) continue;
    check_walk(g, w);
    total += walk_length(g, w);
  }
  return total;
}

void check_plan(const Instance& inst, const Plan& plan) {
  if (plan.batches.size() != plan.walks.size()) throw StructuralError("plan batches and walks differ in count");
  if (static_cast<int>(plan.batches.size()) > inst.fleet) throw StructuralError("plan uses too many trolleys");
  std::vector<int> seen(static_cast<std::size_t>(inst.num_orders()), 0);
  for (std::size_t t = 0; t < plan.batches.size(); ++t) {
    const Walk& w = plan.walks[t];
    int baskets = 0;
    std::set<int> on_walk(w.begin(), w.end());
    for (int o : plan.batches[t]) {
      if (o < 0 || o >= inst.num_orders()) throw StructuralError("plan references an unknown order");
      ++seen[static_cast<std::size_t>(o)];
      baskets += inst.orders[static_cast<std::size_t>(o)].baskets;
      for (int v : inst.order_vertices[static_cast<std::size_t>(o)]) {
        if (!on_walk.contains(v)) throw StructuralError("walk misses a location of its batch");
      }
    }
    if (baskets > inst.trolley_capacity) throw StructuralError("batch exceeds trolley capacity");
    if (plan.batches[t].empty() != w.empty()) throw StructuralError("idle trolley with a walk or vice versa");
    if (!w.empty()) check_walk(inst.graph, w);
  }
  for (int c : seen) {
    if (c != 1) throw StructuralError("order not assigned exactly once");
  }
}

Solution solve_jobprp(const Instance& inst, const SolveConfig& config) {
  const auto t0 = Clock::now();
  validate(inst);
  const auto remaining = [&] { return config.time_limit - elapsed_since(t0); };

  ModelOptions mo;
  mo.families = config.families;
  mo.symmetry = config.symmetry;
  std::optional<CollapsedInstance> collapsed;
  ModelSpec model;
  if (config.no_reversal) {
    NoReversalModel nr = apply_no_reversal(inst, mo);
    collapsed = std::move(nr.collapsed);
    model = std::move(nr.model);
  } else {
    model = build_model(inst, mo);
  }
  const Instance& work = collapsed ? collapsed->instance : inst;
  const PickingGraph& g = work.graph;
  const VariableCatalog& cat = model.cat;

  auto backend = make_backend(config.backend_options);
  backend->load(model);

  Solution sol;
  sol.rows = model.row_counts();
  sol.rows[Family::Connectivity] = 0;
  sol.lb = Distance::decimetres(0);
  std::vector<double> incumbent_values;

  // Heuristic walks may turn inside a subaisle, so they never seed the
  // no-reversal model.
  if (!config.no_reversal) {
    std::optional<Plan> start = config.warm_start;
    if (!start && config.heuristic_start) {
      try {
        start = heuristic_plan(inst);
      } catch (const Infeasible&) {
      }
    }
    if (start) {
      check_plan(inst, *start);
      Plan p = pad_plan(canonical_plan(inst, *start), inst.fleet);
      sol.ub = plan_length(inst.graph, p);
      sol.plan = p;
      try {
        std::vector<double> values = encode_plan(model, inst, p);
        if (replay(model, values, 1e-6).empty()) incumbent_values = std::move(values);
      } catch (const StructuralError&) {
      }
    }
  }

  CutPool pool;
  const auto add_cuts = [&](std::vector<Cut>& cuts, const char* phase) {
    std::vector<ConstraintRow> rows;
    rows.reserve(cuts.size());
    for (Cut& c : cuts) {
      if (config.cut_log) {
        *config.cut_log << phase << " round=" << sol.iterations << " trolley=" << c.trolley + 1
                        << " size=" << c.set.members.size() << " violation=" << c.violation
                        << " members=";
        for (std::size_t i = 0; i < c.set.members.size(); ++i) {
          *config.cut_log << (i ? "," : "") << c.set.members[i];
        }
        *config.cut_log << '\n';
      }
      pool.insert(c.set);
      rows.push_back(std::move(c.row));
    }
    backend->add_rows(rows);
    sol.rows[Family::Connectivity] += static_cast<int>(rows.size());
  };

  if (config.mode == CutMode::Fbc) {
    while (remaining() > 0) {
      const BackendResult r = backend->solve_relaxation(remaining());
      if (r.status != BackendStatus::Optimal) break;
      sol.flb = r.objective;
      std::vector<Cut> cuts = separate(g, cat, pool, r.values, true, config.separation);
      if (cuts.empty()) break;
      add_cuts(cuts, "root");
    }
  } else {
    const BackendResult r = backend->solve_relaxation(std::max(remaining(), 1e-3));
    if (r.status == BackendStatus::Optimal) sol.flb = r.objective;
  }

  bool proven = false;
  while (remaining() > 0) {
    if (!incumbent_values.empty()) backend->set_start(incumbent_values);
    const BackendResult r = backend->solve(remaining());
    ++sol.iterations;
    sol.nodes += r.nodes;
    if (r.status == BackendStatus::Error) throw BackendError("MIP solve failed");
    if (r.status == BackendStatus::Infeasible) {
      throw Infeasible("no assignment of the orders to the trolleys respects capacity");
    }
    if (std::isfinite(r.bound)) {
      const auto bound = static_cast<std::int64_t>(std::ceil(r.bound - 1e-6));
      sol.lb = std::max(sol.lb, Distance::decimetres(bound));
    }
    if (!r.has_solution) break;
    std::vector<Cut> cuts = separate(g, cat, pool, r.values, false, config.separation);
    if (!cuts.empty()) {
      add_cuts(cuts, "integral");
      continue;
    }
    Plan p = plan_from_values(inst, work, collapsed, cat, r.values);
    const Distance len = plan_length(inst.graph, p);
    if (len < sol.ub) {
      sol.ub = len;
      sol.plan = std::move(p);
      incumbent_values = r.values;
    }
    proven = r.status == BackendStatus::Optimal;
    break;
  }

  if (proven) sol.lb = sol.ub;
  if (sol.has_plan()) {
    sol.lb = std::min(sol.lb, sol.ub);
    sol.plan = canonical_plan(inst, sol.plan);
    for (const Walk& w : sol.plan.walks) {
      sol.lengths.push_back(w.empty() ? Distance() : walk_length(inst.graph, w));
    }
  }
  sol.status = proven ? SolveStatus::Optimal : SolveStatus::TimeLimit;
  sol.seconds = elapsed_since(t0);
  return sol;
}

RouteResult solve_routing(const PickingGraph& g, std::span<const int> required, double time_limit) {
  if (required.empty()) return RouteResult{Walk{g.origin()}, Distance(), true};
  const std::set<int> keep(required.begin(), required.end());
  for (int v : keep) {
    if (v < 0 || v >= g.num_vertices() || !g.is_location(v)) {
      throw InvalidInput("required vertices must be location vertices");
    }
  }
  Instance inst;
  inst.name = "route";
  inst.graph = reduce_graph(g, keep);
  ProductId synthetic = 0;
  for (const Vertex& v : g.vertices()) {
    for (ProductId p : v.products) synthetic = std::min(synthetic, p);
  }
  Order order;
  order.id = 1;
  std::vector<int> vs;
  for (int v : keep) {
    const auto& products = g.vertex(v).products;
    order.lines.push_back({products.empty() ? --synthetic : products.front(), 1});
    vs.push_back(*inst.graph.vertex_by_key(g.vertex(v).key));
  }
  std::sort(vs.begin(), vs.end());
  order.items = static_cast<int>(order.lines.size());
  inst.basket_item_capacity = order.items;
  order.baskets = compute_baskets(order.items, inst.basket_item_capacity);
  inst.orders.push_back(std::move(order));
  inst.order_vertices.push_back(std::move(vs));
  inst.trolley_capacity = 1;
  inst.fleet = 1;

  SolveConfig config;
  config.time_limit = time_limit;
  const Solution s = solve_jobprp(inst, config);
  if (!s.has_plan()) throw Error("no route found within the time limit");
  RouteResult out;
  out.walk = lift_walk(inst.graph, s.plan.walks.front(), g);
  out.length = walk_length(g, out.walk);
  out.optimal = s.status == SolveStatus::Optimal;
  return out;
}

void to_json(nlohmann::json& j, const Solution& s) {
  j = nlohmann::json::object();
  j["status"] = status_name(s.status);
  j["ub_dm"] = s.has_plan() ? nlohmann::json(s.ub.dm()) : nlohmann::json(nullptr);
  j["lb_dm"] = s.lb.dm();
  j["flb_dm"] = s.flb;
  j["gap"] = s.gap();
  j["fgap"] = s.fgap();
  j["nodes"] = s.nodes;
  j["iterations"] = s.iterations;
  j["seconds"] = s.seconds;
  nlohmann::json rows = nlohmann::json::object();
  for (const auto& [f, n] : s.rows) rows[family_tag(f)] = n;
  j["rows"] = std::move(rows);
  j["trolleys"] = nlohmann::json::array();
  for (std::size_t t = 0; t < s.plan.batches.size(); ++t) {
    j["trolleys"].push_back({{"orders", s.plan.batches[t]},
                             {"walk", s.plan.walks[t]},
                             {"length_dm", t < s.lengths.size() ? s.lengths[t].dm() : 0}});
  }
}

Solution solution_from_json(const nlohmann::json& j, const Instance& inst) {
  Solution s;
  const std::string status = j.at("status").get<std::string>();
  s.status = status == "optimal"      ? SolveStatus::Optimal
             : status == "time_limit" ? SolveStatus::TimeLimit
                                      : SolveStatus::Heuristic;
  s.lb = Distance::decimetres(j.value("lb_dm", std::int64_t{0}));
  s.flb = j.value("flb_dm", 0.0);
  s.nodes = j.value("nodes", 0LL);
  s.iterations = j.value("iterations", 0);
  s.seconds = j.value("seconds", 0.0);
  if (j.contains("rows")) {
    for (const auto& [tag, n] : j.at("rows").items()) {
      if (const auto f = family_from_tag(tag)) s.rows[*f] = n.get<int>();
    }
  }
  for (const auto& tj : j.at("trolleys")) {
    s.plan.batches.push_back(tj.at("orders").get<std::vector<int>>());
    s.plan.walks.push_back(tj.at("walk").get<Walk>());
  }
  check_plan(inst, s.plan);
  for (const Walk& w : s.plan.walks) s.lengths.push_back(w.empty() ? Distance() : walk_length(inst.graph, w));
  if (!j.at("ub_dm").is_null()) s.ub = plan_length(inst.graph, s.plan);
  return s;
}

std::string csv_header() { return "instance,T(s),UB,GAP,LB,FGAP,FLB,NS"; }

std::string csv_row(const std::string& name, const Solution& s) {
  std::string row = name + "," + fixed1(s.seconds) + ",";
  row += s.has_plan() ? format_metres(s.ub) : std::string("inf");
  row += "," + fixed1(s.gap()) + "," + format_metres(s.lb) + "," + fixed1(s.fgap()) + "," +
         fixed1(s.flb / 10.0) + "," + std::to_string(s.nodes);
  return row;
}

}  // namespace jobprp
