#include "jobprp/separation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "jobprp/error.hpp"

namespace jobprp {

namespace {

struct Residual {
  int to;
  int rev;
  std::int64_t cap;
};

}  // namespace

MaxFlowResult max_flow(const FlowNetwork& net) {
  const int n = net.num_vertices;
  if (net.source < 0 || net.source >= n || net.sink < 0 || net.sink >= n || net.source == net.sink) {
    throw InvalidInput("flow network needs distinct source and sink");
  }
  std::vector<std::vector<Residual>> adj(static_cast<std::size_t>(n));
  for (const FlowArc& a : net.arcs) {
    if (a.capacity < 0) throw InvalidInput("negative capacity");
    if (a.from == a.to) continue;
    auto& fwd = adj[static_cast<std::size_t>(a.from)];
    auto& bwd = adj[static_cast<std::size_t>(a.to)];
    fwd.push_back({a.to, static_cast<int>(bwd.size()), a.capacity});
    bwd.push_back({a.from, static_cast<int>(fwd.size()) - 1, 0});
  }

  std::vector<std::int64_t> excess(static_cast<std::size_t>(n), 0);
  std::vector<int> height(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> current(static_cast<std::size_t>(n), 0);
  std::deque<int> active;
  const auto push = [&](int u, Residual& r, std::int64_t amount) {
    r.cap -= amount;
    adj[static_cast<std::size_t>(r.to)][static_cast<std::size_t>(r.rev)].cap += amount;
    excess[static_cast<std::size_t>(u)] -= amount;
    if (excess[static_cast<std::size_t>(r.to)] == 0 && r.to != net.source && r.to != net.sink) {
      active.push_back(r.to);
    }
    excess[static_cast<std::size_t>(r.to)] += amount;
  };

  height[static_cast<std::size_t>(net.source)] = n;
  for (Residual& r : adj[static_cast<std::size_t>(net.source)]) {
    if (r.cap > 0) {
      excess[static_cast<std::size_t>(net.source)] += r.cap;
      push(net.source, r, r.cap);
    }
  }

  while (!active.empty()) {
    const int u = active.front();
    active.pop_front();
    auto& edges = adj[static_cast<std::size_t>(u)];
    auto& cur = current[static_cast<std::size_t>(u)];
    while (excess[static_cast<std::size_t>(u)] > 0) {
      if (cur == edges.size()) {
        int lowest = 2 * n;
        for (const Residual& r : edges) {
          if (r.cap > 0) lowest = std::min(lowest, height[static_cast<std::size_t>(r.to)]);
        }
        height[static_cast<std::size_t>(u)] = lowest + 1;
        cur = 0;
        continue;
      }
      Residual& r = edges[cur];
      if (r.cap > 0 && height[static_cast<std::size_t>(u)] == height[static_cast<std::size_t>(r.to)] + 1) {
        push(u, r, std::min(excess[static_cast<std::size_t>(u)], r.cap));
      } else {
        ++cur;
      }
    }
  }

  MaxFlowResult result;
  result.value = excess[static_cast<std::size_t>(net.sink)];
  result.source_side.assign(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{net.source};
  result.source_side[static_cast<std::size_t>(net.source)] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const Residual& r : adj[static_cast<std::size_t>(u)]) {
      if (r.cap > 0 && !result.source_side[static_cast<std::size_t>(r.to)]) {
        result.source_side[static_cast<std::size_t>(r.to)] = 1;
        stack.push_back(r.to);
      }
    }
  }
  return result;
}

std::vector<Component> integral_components(const PickingGraph& g, const VariableCatalog& cat,
                                           int t, std::span<const double> values) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<char> touched(n, 0);
  const auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (int e = 0; e < g.num_arcs(); ++e) {
    if (values[static_cast<std::size_t>(cat.x[t][e])] <= 0.5) continue;
    const int u = g.arc(e).tail;
    const int v = g.arc(e).head;
    touched[static_cast<std::size_t>(u)] = touched[static_cast<std::size_t>(v)] = 1;
    const int ru = find(u);
    const int rv = find(v);
    if (ru != rv) parent[static_cast<std::size_t>(std::max(ru, rv))] = std::min(ru, rv);
  }
  const int origin_root = find(g.origin());
  std::map<int, Component> by_root;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (!touched[static_cast<std::size_t>(v)]) continue;
    const int r = find(v);
    if (r == origin_root) continue;
    by_root[r].members.push_back(v);
  }
  std::vector<Component> out;
  for (auto& [root, comp] : by_root) {
    comp.representative = comp.members.front();
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<Cut> separate_fractional(const PickingGraph& g, const VariableCatalog& cat, int t,
                                     std::span<const double> values, const SeparationConfig& config) {
  const double eps = config.epsilon;
  const int n = g.num_vertices();
  const int s = g.origin();
  const auto yv = [&](int v) { return values[static_cast<std::size_t>(cat.y[t][v])]; };

  std::vector<char> support(static_cast<std::size_t>(n), 0);
  std::vector<int> candidates;
  for (int v = 0; v < n; ++v) {
    if (v != s && yv(v) > eps) {
      support[static_cast<std::size_t>(v)] = 1;
      candidates.push_back(v);
    }
  }
  support[static_cast<std::size_t>(s)] = 1;
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) { return yv(a) > yv(b); });

  FlowNetwork net;
  net.num_vertices = n;
  net.sink = s;
  for (int e = 0; e < g.num_arcs(); ++e) {
    const Arc& a = g.arc(e);
    const double xv = values[static_cast<std::size_t>(cat.x[t][e])];
    if (xv <= eps || !support[static_cast<std::size_t>(a.tail)] || !support[static_cast<std::size_t>(a.head)]) {
      continue;
    }
    net.arcs.push_back({a.tail, a.head, std::llround(xv * config.capacity_scale)});
  }

  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  std::vector<Cut> cuts;
  for (int i : candidates) {
    if (covered[static_cast<std::size_t>(i)]) continue;
    net.source = i;
    const MaxFlowResult flow = max_flow(net);
    if (static_cast<double>(flow.value) / config.capacity_scale >= yv(i) - eps) continue;
    Component comp;
    for (int v = 0; v < n; ++v) {
      if (flow.source_side[static_cast<std::size_t>(v)]) comp.members.push_back(v);
    }
    if (comp.members.size() < 2) continue;
    comp.representative = i;
    ConstraintRow row = connectivity_row(cat, g, t, comp.members, i);
    const double violation = row_violation(row, values);
    if (violation <= eps) continue;
    for (int v : comp.members) covered[static_cast<std::size_t>(v)] = 1;
    cuts.push_back(Cut{t, std::move(comp), std::move(row), violation});
  }
  return cuts;
}

void CutPool::touch(std::list<Entry>::iterator it) { entries_.splice(entries_.begin(), entries_, it); }

bool CutPool::insert(const Component& set) {
  if (const auto it = index_.find(set.members); it != index_.end()) {
    touch(it->second);
    return false;
  }
  entries_.push_front(Entry{set, 0});
  index_[set.members] = entries_.begin();
  while (entries_.size() > capacity_) {
    index_.erase(entries_.back().set.members);
    entries_.pop_back();
  }
  return true;
}

std::vector<Cut> CutPool::violated(const PickingGraph& g, const VariableCatalog& cat, int t,
                                   std::span<const double> values, double epsilon) {
  std::vector<Cut> out;
  std::vector<std::list<Entry>::iterator> hit;
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    // The strongest row for a set uses its member with the largest y.
    int best = it->set.members.front();
    for (int v : it->set.members) {
      if (values[static_cast<std::size_t>(cat.y[t][v])] > values[static_cast<std::size_t>(cat.y[t][best])]) {
        best = v;
      }
    }
    ConstraintRow row = connectivity_row(cat, g, t, it->set.members, best);
    const double violation = row_violation(row, values);
    if (violation <= epsilon) continue;
    Component comp{it->set.members, best};
    out.push_back(Cut{t, std::move(comp), std::move(row), violation});
    ++it->hits;
    hit.push_back(it);
  }
  for (auto it = hit.rbegin(); it != hit.rend(); ++it) touch(*it);
  return out;
}

}  // namespace jobprp
