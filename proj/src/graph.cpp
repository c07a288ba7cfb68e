#include "jobprp/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <tuple>

#include "jobprp/error.hpp"

namespace jobprp {

namespace {

std::string kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::Origin:
      return "origin";
    case VertexKind::Artificial:
      return "artificial";
    case VertexKind::Location:
      return "location";
  }
  return "?";
}

VertexKind parse_kind(const std::string& s) {
  if (s == "origin") return VertexKind::Origin;
  if (s == "artificial") return VertexKind::Artificial;
  if (s == "location") return VertexKind::Location;
  throw InvalidInput("unknown vertex kind '" + s + "'");
}

std::string describe(const Vertex& v) {
  std::ostringstream os;
  switch (v.kind) {
    case VertexKind::Origin:
      os << "s";
      break;
    case VertexKind::Artificial:
      os << "v(" << v.aisle << "," << v.cross << ")";
      break;
    case VertexKind::Location:
      os << "S(" << v.aisle << "," << v.cross << "," << v.rank << ")";
      break;
  }
  return os.str();
}

}  // namespace

PickingGraph::PickingGraph(int num_aisles, int num_cross_aisles, std::vector<Vertex> vertices,
                           std::vector<Arc> arcs)
    : num_aisles_(num_aisles),
      num_cross_aisles_(num_cross_aisles),
      vertices_(std::move(vertices)),
      arcs_(std::move(arcs)) {
  if (num_aisles_ < 1 || num_cross_aisles_ < 2) {
    throw InvalidInput("graph needs at least one aisle and two cross-aisles");
  }
  const int n = num_vertices();
  out_.assign(static_cast<std::size_t>(n), {});
  in_.assign(static_cast<std::size_t>(n), {});
  const auto cells = static_cast<std::size_t>(num_aisles_ * num_cross_aisles_);
  artificial_.assign(cells, -1);
  subaisles_.assign(cells, {});

  int origins = 0;
  for (int v = 0; v < n; ++v) {
    const Vertex& vx = vertices_[static_cast<std::size_t>(v)];
    if (!key_index_.emplace(vx.key, v).second) {
      throw InvalidInput("duplicate vertex key " + std::to_string(vx.key));
    }
    const bool aisle_ok = vx.aisle >= 1 && vx.aisle <= num_aisles_;
    switch (vx.kind) {
      case VertexKind::Origin:
        origin_ = v;
        ++origins;
        break;
      case VertexKind::Artificial: {
        if (!aisle_ok || vx.cross < 1 || vx.cross > num_cross_aisles_) {
          throw InvalidInput("artificial vertex outside the layout: " + describe(vx));
        }
        int& slot = artificial_[static_cast<std::size_t>((vx.cross - 1) * num_aisles_ + vx.aisle - 1)];
        if (slot != -1) throw InvalidInput("duplicate artificial vertex " + describe(vx));
        slot = v;
        break;
      }
      case VertexKind::Location:
        if (!aisle_ok || vx.cross < 1 || vx.cross >= num_cross_aisles_) {
          throw InvalidInput("location vertex outside the layout: " + describe(vx));
        }
        subaisles_[static_cast<std::size_t>((vx.cross - 1) * num_aisles_ + vx.aisle - 1)]
            .push_back(v);
        break;
    }
  }
  if (origins != 1) throw InvalidInput("graph must have exactly one origin");
  for (int slot : artificial_) {
    if (slot == -1) throw InvalidInput("missing artificial vertex");
  }
  for (auto& column : subaisles_) {
    std::sort(column.begin(), column.end(),
              [&](int a, int b) { return vertex(a).rank < vertex(b).rank; });
    for (std::size_t r = 0; r < column.size(); ++r) {
      if (vertex(column[r]).rank != static_cast<int>(r) + 1) {
        throw InvalidInput("subaisle ranks must run 1..R: " + describe(vertex(column[r])));
      }
    }
  }

  for (int e = 0; e < num_arcs(); ++e) {
    const Arc& a = arcs_[static_cast<std::size_t>(e)];
    if (a.tail < 0 || a.tail >= n || a.head < 0 || a.head >= n || a.tail == a.head) {
      throw InvalidInput("arc endpoints invalid");
    }
    if (a.length < Distance{}) throw InvalidInput("negative arc length");
    if (!arc_index_.emplace(std::pair{a.tail, a.head}, e).second) {
      throw InvalidInput("parallel arcs between " + describe(vertex(a.tail)) + " and " +
                         describe(vertex(a.head)));
    }
    out_[static_cast<std::size_t>(a.tail)].push_back(e);
    in_[static_cast<std::size_t>(a.head)].push_back(e);
  }
  reverse_.assign(static_cast<std::size_t>(num_arcs()), -1);
  for (int e = 0; e < num_arcs(); ++e) {
    const Arc& a = arc(e);
    const auto back = find_arc(a.head, a.tail);
    if (!back || arc(*back).length != a.length) {
      throw InvalidInput("arc " + describe(vertex(a.tail)) + "->" + describe(vertex(a.head)) +
                         " lacks a reverse arc of equal length");
    }
    reverse_[static_cast<std::size_t>(e)] = *back;
  }
  check_structure();
}

void PickingGraph::check_structure() const {
  for (int e : out_arcs(origin_)) {
    const Vertex& h = vertex(arc(e).head);
    if (h.kind != VertexKind::Artificial || h.cross != 1) {
      throw InvalidInput("origin may only connect to top cross-aisle vertices");
    }
  }
  for (int v = 0; v < num_vertices(); ++v) {
    const auto degree = out_arcs(v).size();
    if (is_location(v) && degree != 2) {
      throw InvalidInput("location vertex " + describe(vertex(v)) + " must have 2 neighbours");
    }
    if (is_artificial(v) && degree > 4) {
      throw InvalidInput("artificial vertex " + describe(vertex(v)) + " has over 4 neighbours");
    }
  }
  // Each subaisle is a chain v(a,c) - S(a,c,1) - ... - S(a,c,R) - v(a,c+1).
  for (int a = 1; a <= num_aisles_; ++a) {
    for (int c = 1; c < num_cross_aisles_; ++c) {
      const auto& column = subaisle(a, c);
      if (column.empty()) continue;
      int prev = artificial(a, c);
      for (int v : column) {
        if (!find_arc(prev, v)) {
          throw InvalidInput("subaisle chain broken at " + describe(vertex(v)));
        }
        prev = v;
      }
      if (!find_arc(prev, artificial(a, c + 1))) {
        throw InvalidInput("subaisle chain broken below " + describe(vertex(prev)));
      }
    }
  }
  std::vector<char> seen(static_cast<std::size_t>(num_vertices()), 0);
  std::vector<int> stack{origin_};
  seen[static_cast<std::size_t>(origin_)] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int e : out_arcs(v)) {
      const int h = arc(e).head;
      if (!seen[static_cast<std::size_t>(h)]) {
        seen[static_cast<std::size_t>(h)] = 1;
        ++reached;
        stack.push_back(h);
      }
    }
  }
  if (reached != num_vertices()) throw InvalidInput("graph is not connected");
}

std::optional<int> PickingGraph::find_arc(int tail, int head) const {
  const auto it = arc_index_.find({tail, head});
  if (it == arc_index_.end()) return std::nullopt;
  return it->second;
}

int PickingGraph::arc_between(int tail, int head) const {
  const auto e = find_arc(tail, head);
  if (!e) {
    throw StructuralError("no arc " + describe(vertex(tail)) + "->" + describe(vertex(head)));
  }
  return *e;
}

std::optional<int> PickingGraph::vertex_by_key(std::int64_t key) const {
  const auto it = key_index_.find(key);
  if (it == key_index_.end()) return std::nullopt;
  return it->second;
}

int PickingGraph::artificial(int aisle, int cross) const {
  return artificial_.at(static_cast<std::size_t>((cross - 1) * num_aisles_ + aisle - 1));
}

const std::vector<int>& PickingGraph::subaisle(int aisle, int cross) const {
  return subaisles_.at(static_cast<std::size_t>((cross - 1) * num_aisles_ + aisle - 1));
}

int PickingGraph::first_in_subaisle(int aisle, int cross) const {
  const auto& column = subaisle(aisle, cross);
  return column.empty() ? artificial(aisle, cross + 1) : column.front();
}

int PickingGraph::last_in_subaisle(int aisle, int cross) const {
  const auto& column = subaisle(aisle, cross);
  return column.empty() ? artificial(aisle, cross) : column.back();
}

std::vector<int> PickingGraph::location_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < num_vertices(); ++v) {
    if (is_location(v)) out.push_back(v);
  }
  return out;
}

PickingGraph build_full_graph(const WarehouseLayout& layout) {
  const LayoutConfig& cfg = layout.config;
  const double pitch = 2.0 * cfg.rack_depth + cfg.aisle_width;
  const auto aisle_x = [&](int a) { return (a - 1) * pitch; };

  std::vector<Vertex> vertices;
  std::vector<Arc> arcs;
  const auto add_vertex = [&](Vertex v) {
    v.key = static_cast<std::int64_t>(vertices.size());
    vertices.push_back(std::move(v));
    return static_cast<int>(vertices.size()) - 1;
  };
  const auto add_edge = [&](int u, int v, Distance d) {
    arcs.push_back(Arc{u, v, d, {}});
    arcs.push_back(Arc{v, u, d, {}});
  };

  const int s = add_vertex(Vertex{VertexKind::Origin, 0, 0, 0, -cfg.origin_offset, 0.0, 0, {}});

  // Vertical position of each cross-aisle centre line.
  std::vector<double> cross_y(static_cast<std::size_t>(cfg.num_cross_aisles) + 1, 0.0);
  const auto& split = layout.subaisle_slot_counts.front();
  for (int c = 1; c < cfg.num_cross_aisles; ++c) {
    cross_y[static_cast<std::size_t>(c) + 1] =
        cross_y[static_cast<std::size_t>(c)] + cfg.cross_aisle_width +
        split[static_cast<std::size_t>(c) - 1] * cfg.slot_width;
  }

  std::vector<std::vector<int>> art(static_cast<std::size_t>(cfg.num_aisles) + 1,
                                    std::vector<int>(static_cast<std::size_t>(cfg.num_cross_aisles) + 1));
  for (int c = 1; c <= cfg.num_cross_aisles; ++c) {
    for (int a = 1; a <= cfg.num_aisles; ++a) {
      art[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = add_vertex(
          Vertex{VertexKind::Artificial, a, c, 0, aisle_x(a), cross_y[static_cast<std::size_t>(c)], 0, {}});
    }
  }

  // Products reachable from each slot column, keyed by (aisle, slot).
  std::map<std::pair<int, int>, std::vector<ProductId>> column_products;
  for (const auto& [product, coord] : layout.placement) {
    column_products[{coord.aisle, coord.slot}].push_back(product);
  }

  const Distance end_link = Distance::metres(cfg.cross_aisle_width / 2.0 + cfg.slot_width / 2.0);
  const Distance step = Distance::metres(cfg.slot_width);
  for (int a = 1; a <= cfg.num_aisles; ++a) {
    const auto& counts = layout.subaisle_slot_counts[static_cast<std::size_t>(a) - 1];
    int slot = 0;
    for (int c = 1; c < cfg.num_cross_aisles; ++c) {
      int prev = art[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
      const int below = art[static_cast<std::size_t>(a)][static_cast<std::size_t>(c) + 1];
      const int count = counts[static_cast<std::size_t>(c) - 1];
      if (count == 0) {
        add_edge(prev, below, Distance::metres(cfg.cross_aisle_width));
        continue;
      }
      for (int r = 1; r <= count; ++r) {
        ++slot;
        Vertex loc{VertexKind::Location, a, c, r, aisle_x(a),
                   cross_y[static_cast<std::size_t>(c)] + cfg.cross_aisle_width / 2.0 +
                       (r - 0.5) * cfg.slot_width,
                   0, {}};
        if (const auto it = column_products.find({a, slot}); it != column_products.end()) {
          loc.products = it->second;
        }
        const int v = add_vertex(std::move(loc));
        add_edge(prev, v, r == 1 ? end_link : step);
        prev = v;
      }
      add_edge(prev, below, end_link);
    }
  }

  const Distance across = Distance::metres(pitch);
  for (int c = 1; c <= cfg.num_cross_aisles; ++c) {
    for (int a = 1; a < cfg.num_aisles; ++a) {
      add_edge(art[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)],
               art[static_cast<std::size_t>(a) + 1][static_cast<std::size_t>(c)], across);
    }
  }
  for (int a = 1; a <= cfg.num_aisles; ++a) {
    add_edge(s, art[static_cast<std::size_t>(a)][1], Distance::metres(cfg.origin_offset + aisle_x(a)));
  }
  return PickingGraph(cfg.num_aisles, cfg.num_cross_aisles, std::move(vertices), std::move(arcs));
}

PickingGraph reduce_graph(const PickingGraph& g, const std::set<int>& keep) {
  const int n = g.num_vertices();
  std::vector<int> new_id(static_cast<std::size_t>(n), -1);
  std::vector<Vertex> vertices;
  for (int v = 0; v < n; ++v) {
    if (g.is_location(v) && !keep.contains(v)) continue;
    new_id[static_cast<std::size_t>(v)] = static_cast<int>(vertices.size());
    vertices.push_back(g.vertex(v));
  }
  // Re-rank surviving subaisle vertices.
  for (int a = 1; a <= g.num_aisles(); ++a) {
    for (int c = 1; c < g.num_cross_aisles(); ++c) {
      int r = 0;
      for (int v : g.subaisle(a, c)) {
        if (new_id[static_cast<std::size_t>(v)] >= 0) {
          vertices[static_cast<std::size_t>(new_id[static_cast<std::size_t>(v)])].rank = ++r;
        }
      }
    }
  }

  std::vector<Arc> arcs;
  for (int u = 0; u < n; ++u) {
    if (new_id[static_cast<std::size_t>(u)] < 0) continue;
    for (int e : g.out_arcs(u)) {
      Arc merged{new_id[static_cast<std::size_t>(u)], -1, g.arc(e).length, g.arc(e).hidden};
      int prev = u;
      int cur = g.arc(e).head;
      while (new_id[static_cast<std::size_t>(cur)] < 0) {
        // Eliminated vertices are chain interiors with exactly two neighbours.
        merged.hidden.push_back(g.vertex(cur).key);
        int next = -1;
        for (int f : g.out_arcs(cur)) {
          if (g.arc(f).head != prev) {
            next = f;
            break;
          }
        }
        merged.length += g.arc(next).length;
        merged.hidden.insert(merged.hidden.end(), g.arc(next).hidden.begin(),
                             g.arc(next).hidden.end());
        prev = cur;
        cur = g.arc(next).head;
      }
      merged.head = new_id[static_cast<std::size_t>(cur)];
      arcs.push_back(std::move(merged));
    }
  }
  return PickingGraph(g.num_aisles(), g.num_cross_aisles(), std::move(vertices), std::move(arcs));
}

std::vector<int> ShortestPaths::path_to(int target) const {
  std::vector<int> path;
  if (dist[static_cast<std::size_t>(target)].is_infinite()) return path;
  for (int v = target; v != -1; v = pred[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

ShortestPaths shortest_paths(const PickingGraph& g, int source, bool transit_origin) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  ShortestPaths sp{std::vector<Distance>(n, Distance::infinity()), std::vector<int>(n, -1),
                   std::vector<int>(n, 0)};
  using Label = std::tuple<Distance, int, int>;  // length, hops, vertex
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  sp.dist[static_cast<std::size_t>(source)] = Distance{};
  heap.emplace(Distance{}, 0, source);
  std::vector<char> done(n, 0);
  while (!heap.empty()) {
    const auto [d, h, v] = heap.top();
    heap.pop();
    if (done[static_cast<std::size_t>(v)]) continue;
    done[static_cast<std::size_t>(v)] = 1;
    if (!transit_origin && v == g.origin() && v != source) continue;
    for (int e : g.out_arcs(v)) {
      const int w = g.arc(e).head;
      const Distance nd = d + g.arc(e).length;
      auto& best = sp.dist[static_cast<std::size_t>(w)];
      auto& best_hops = sp.hops[static_cast<std::size_t>(w)];
      if (nd < best || (nd == best && h + 1 < best_hops)) {
        best = nd;
        best_hops = h + 1;
        sp.pred[static_cast<std::size_t>(w)] = v;
        heap.emplace(nd, h + 1, w);
      }
    }
  }
  return sp;
}

std::vector<std::vector<Distance>> metric_closure(const PickingGraph& g,
                                                  std::span<const int> terminals,
                                                  bool transit_origin) {
  const std::size_t k = terminals.size();
  std::vector<std::vector<Distance>> m(k, std::vector<Distance>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const auto sp = shortest_paths(g, terminals[i], transit_origin);
    for (std::size_t j = 0; j < k; ++j) m[i][j] = sp.dist[static_cast<std::size_t>(terminals[j])];
  }
  return m;
}

Distance walk_length(const PickingGraph& g, const Walk& walk) {
  Distance total;
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
    total += g.arc(g.arc_between(walk[i], walk[i + 1])).length;
  }
  return total;
}

void check_walk(const PickingGraph& g, const Walk& walk) {
  if (walk.empty()) throw StructuralError("empty walk");
  if (walk.front() != g.origin() || walk.back() != g.origin()) {
    throw StructuralError("walk must start and end at the origin");
  }
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) g.arc_between(walk[i], walk[i + 1]);
}

Walk make_arc_simple(const PickingGraph& g, Walk walk) {
  for (;;) {
    std::map<int, std::size_t> first_use;
    bool changed = false;
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
      const int e = g.arc_between(walk[i], walk[i + 1]);
      const auto [it, fresh] = first_use.emplace(e, i);
      if (fresh) continue;
      const std::size_t p = it->second;
      Walk next(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(p));
      for (std::size_t k = i; k > p; --k) next.push_back(walk[k]);
      next.insert(next.end(), walk.begin() + static_cast<std::ptrdiff_t>(i) + 2, walk.end());
      walk = std::move(next);
      changed = true;
      break;
    }
    if (!changed) return walk;
  }
}

Walk lift_walk(const PickingGraph& reduced, const Walk& walk, const PickingGraph& parent) {
  const auto to_parent = [&](std::int64_t key) {
    const auto v = parent.vertex_by_key(key);
    if (!v) throw StructuralError("vertex key " + std::to_string(key) + " missing from parent");
    return *v;
  };
  Walk lifted;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    lifted.push_back(to_parent(reduced.vertex(walk[i]).key));
    if (i + 1 == walk.size()) break;
    const Arc& a = reduced.arc(reduced.arc_between(walk[i], walk[i + 1]));
    for (auto key : a.hidden) {
      // Keys the parent itself dropped are already hidden in its arcs.
      if (const auto v = parent.vertex_by_key(key)) lifted.push_back(*v);
    }
  }
  return lifted;
}

std::string to_dot(const PickingGraph& g) {
  std::ostringstream os;
  os << "graph picking {\n  node [shape=circle, fontsize=9];\n";
  for (int v = 0; v < g.num_vertices(); ++v) {
    const Vertex& vx = g.vertex(v);
    os << "  n" << v << " [label=\"" << describe(vx) << "\", pos=\"" << vx.x << "," << -vx.y
       << "!\"";
    if (vx.kind == VertexKind::Artificial) os << ", style=filled, fillcolor=black, fontcolor=white";
    if (vx.kind == VertexKind::Origin) os << ", shape=box";
    os << "];\n";
  }
  for (int e = 0; e < g.num_arcs(); ++e) {
    const Arc& a = g.arc(e);
    if (a.tail > a.head) continue;
    os << "  n" << a.tail << " -- n" << a.head << " [label=\"" << format_metres(a.length)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

void to_json(nlohmann::json& j, const PickingGraph& g) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const Vertex& v : g.vertices()) {
    nlohmann::json jv{{"key", v.key}, {"kind", kind_name(v.kind)}, {"x", v.x}, {"y", v.y}};
    if (v.kind != VertexKind::Origin) {
      jv["aisle"] = v.aisle;
      jv["cross"] = v.cross;
    }
    if (v.kind == VertexKind::Location) {
      jv["rank"] = v.rank;
      jv["products"] = v.products;
    }
    vertices.push_back(std::move(jv));
  }
  // One entry per undirected edge; the reverse arc is implied.
  nlohmann::json edges = nlohmann::json::array();
  for (const Arc& a : g.arcs()) {
    if (a.tail > a.head) continue;
    nlohmann::json je{{"u", g.vertex(a.tail).key},
                      {"v", g.vertex(a.head).key},
                      {"length_dm", a.length.dm()}};
    if (!a.hidden.empty()) je["hidden"] = a.hidden;
    edges.push_back(std::move(je));
  }
  j = nlohmann::json{{"num_aisles", g.num_aisles()},
                     {"num_cross_aisles", g.num_cross_aisles()},
                     {"vertices", std::move(vertices)},
                     {"edges", std::move(edges)}};
}

void from_json(const nlohmann::json& j, PickingGraph& g) {
  std::vector<Vertex> vertices;
  std::map<std::int64_t, int> index;
  for (const auto& jv : j.at("vertices")) {
    Vertex v;
    v.key = jv.at("key").get<std::int64_t>();
    v.kind = parse_kind(jv.at("kind").get<std::string>());
    v.x = jv.value("x", 0.0);
    v.y = jv.value("y", 0.0);
    if (v.kind != VertexKind::Origin) {
      v.aisle = jv.at("aisle").get<int>();
      v.cross = jv.at("cross").get<int>();
    }
    if (v.kind == VertexKind::Location) {
      v.rank = jv.at("rank").get<int>();
      v.products = jv.value("products", std::vector<ProductId>{});
    }
    if (!index.emplace(v.key, static_cast<int>(vertices.size())).second) {
      throw InvalidInput("duplicate vertex key " + std::to_string(v.key));
    }
    vertices.push_back(std::move(v));
  }
  const auto lookup = [&](std::int64_t key) {
    const auto it = index.find(key);
    if (it == index.end()) throw InvalidInput("edge references unknown vertex " + std::to_string(key));
    return it->second;
  };
  std::vector<Arc> arcs;
  for (const auto& je : j.at("edges")) {
    const int u = lookup(je.at("u").get<std::int64_t>());
    const int v = lookup(je.at("v").get<std::int64_t>());
    const Distance d = Distance::decimetres(je.at("length_dm").get<std::int64_t>());
    auto hidden = je.value("hidden", std::vector<std::int64_t>{});
    std::vector<std::int64_t> back(hidden.rbegin(), hidden.rend());
    arcs.push_back(Arc{u, v, d, std::move(hidden)});
    arcs.push_back(Arc{v, u, d, std::move(back)});
  }
  g = PickingGraph(j.at("num_aisles").get<int>(), j.at("num_cross_aisles").get<int>(),
                   std::move(vertices), std::move(arcs));
}

}  // namespace jobprp
