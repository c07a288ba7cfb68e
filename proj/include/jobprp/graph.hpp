#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jobprp/distance.hpp"
#include "jobprp/warehouse.hpp"

namespace jobprp {

enum class VertexKind { Origin, Artificial, Location };

struct Vertex {
  VertexKind kind = VertexKind::Location;
  // Artificial: v(aisle, cross). Location: S(aisle, cross, rank), i.e. the
  // rank'th vertex north to south in the subaisle below v(aisle, cross).
  int aisle = 0;
  int cross = 0;
  int rank = 0;
  double x = 0.0;  // metres, west to east
  double y = 0.0;  // metres, north to south
  // Stable identity shared with the graph this one was reduced from.
  std::int64_t key = 0;
  std::vector<ProductId> products;
};

struct Arc {
  int tail = 0;
  int head = 0;
  Distance length;
  // Keys of eliminated vertices between tail and head, in walking order.
  std::vector<std::int64_t> hidden;
};

// A closed walk as a vertex sequence starting and ending at the origin.
using Walk = std::vector<int>;

class PickingGraph {
 public:
  PickingGraph() = default;
  PickingGraph(int num_aisles, int num_cross_aisles, std::vector<Vertex> vertices,
               std::vector<Arc> arcs);

  int num_aisles() const { return num_aisles_; }
  int num_cross_aisles() const { return num_cross_aisles_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  int origin() const { return origin_; }

  const Vertex& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Arc& arc(int e) const { return arcs_[static_cast<std::size_t>(e)]; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<int>& out_arcs(int v) const { return out_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& in_arcs(int v) const { return in_[static_cast<std::size_t>(v)]; }

  std::optional<int> find_arc(int tail, int head) const;
  int arc_between(int tail, int head) const;  // throws when absent
  int reverse_arc(int e) const { return reverse_[static_cast<std::size_t>(e)]; }
  std::optional<int> vertex_by_key(std::int64_t key) const;

  int artificial(int aisle, int cross) const;
  // S(a,c,1..R) north to south; empty when the subaisle holds no vertex.
  const std::vector<int>& subaisle(int aisle, int cross) const;
  // S(a,c,1), or v(a,c+1) when the subaisle is empty.
  int first_in_subaisle(int aisle, int cross) const;
  // S(a,c,R), or v(a,c) when the subaisle is empty.
  int last_in_subaisle(int aisle, int cross) const;
  std::vector<int> location_vertices() const;
  bool is_artificial(int v) const { return vertex(v).kind == VertexKind::Artificial; }
  bool is_location(int v) const { return vertex(v).kind == VertexKind::Location; }

 private:
  void check_structure() const;

  int num_aisles_ = 0;
  int num_cross_aisles_ = 0;
  int origin_ = 0;
  std::vector<Vertex> vertices_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<int> reverse_;
  std::map<std::pair<int, int>, int> arc_index_;
  std::map<std::int64_t, int> key_index_;
  std::vector<int> artificial_;                    // (c-1)*W_A + (a-1)
  std::vector<std::vector<int>> subaisles_;        // (c-1)*W_A + (a-1)
};

PickingGraph build_full_graph(const WarehouseLayout& layout);

// Drops every location vertex outside `keep`; artificial vertices and the
// origin are always retained. `keep` holds vertex ids of `g`.
PickingGraph reduce_graph(const PickingGraph& g, const std::set<int>& keep);

struct ShortestPaths {
  std::vector<Distance> dist;
  std::vector<int> pred;  // -1 at the source and at unreachable vertices
  std::vector<int> hops;

  std::vector<int> path_to(int target) const;
};

// Label-setting shortest paths. Ties in length go to fewer arcs. When
// `transit_origin` is false the origin may be an endpoint but never an
// interior vertex of a path.
ShortestPaths shortest_paths(const PickingGraph& g, int source, bool transit_origin = true);

// Pairwise shortest-path distances between `terminals`, in their given order.
std::vector<std::vector<Distance>> metric_closure(const PickingGraph& g,
                                                  std::span<const int> terminals,
                                                  bool transit_origin = true);

Distance walk_length(const PickingGraph& g, const Walk& walk);
// Throws StructuralError unless `walk` is a closed walk from the origin along
// existing arcs.
void check_walk(const PickingGraph& g, const Walk& walk);
// Rewrites A i j B i j C into A i reverse(B) j C until no arc is used twice
// in the same direction. Never lengthens the walk.
Walk make_arc_simple(const PickingGraph& g, Walk walk);
// Expands a walk of a reduced graph into the vertex ids of `parent`, which may
// itself be a reduced graph.
Walk lift_walk(const PickingGraph& reduced, const Walk& walk, const PickingGraph& parent);

std::string to_dot(const PickingGraph& g);

void to_json(nlohmann::json& j, const PickingGraph& g);
void from_json(const nlohmann::json& j, PickingGraph& g);

}  // namespace jobprp
