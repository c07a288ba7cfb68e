#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <span>
#include <vector>

#include "jobprp/graph.hpp"
#include "jobprp/model.hpp"

namespace jobprp {

struct FlowArc {
  int from = 0;
  int to = 0;
  std::int64_t capacity = 0;
};

struct FlowNetwork {
  int num_vertices = 0;
  std::vector<FlowArc> arcs;
  int source = 0;
  int sink = 1;
};

struct MaxFlowResult {
  std::int64_t value = 0;
  // source_side[v] != 0 for vertices on the source side of a minimum cut.
  std::vector<char> source_side;
};

// FIFO push-relabel. The cut side is the set of vertices reachable from the
// source in the final residual graph.
MaxFlowResult max_flow(const FlowNetwork& net);

struct Component {
  std::vector<int> members;  // ascending vertex ids
  int representative = 0;    // lowest member id
};

// Components of the undirected support of arcs with x > 0.5 for trolley t
// that do not contain the origin.
std::vector<Component> integral_components(const PickingGraph& g, const VariableCatalog& cat,
                                           int t, std::span<const double> values);

struct SeparationConfig {
  double epsilon = 1e-6;
  double capacity_scale = 1e6;
};

struct Cut {
  int trolley = 0;
  Component set;
  ConstraintRow row;
  double violation = 0.0;
};

// Min-cut separation of connectivity rows at a fractional point.
std::vector<Cut> separate_fractional(const PickingGraph& g, const VariableCatalog& cat, int t,
                                     std::span<const double> values,
                                     const SeparationConfig& config = {});

// Vertex sets that produced connectivity rows, reused across trolleys.
class CutPool {
 public:
  explicit CutPool(std::size_t capacity = 5000) : capacity_(capacity) {}

  // Returns false when the set is already pooled (it is still marked used).
  bool insert(const Component& set);
  // Pooled sets violated for trolley t at `values`, most recent first.
  std::vector<Cut> violated(const PickingGraph& g, const VariableCatalog& cat, int t,
                            std::span<const double> values, double epsilon);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  struct Entry {
    Component set;
    int hits = 0;
  };
  void touch(std::list<Entry>::iterator it);

  std::size_t capacity_;
  std::list<Entry> entries_;  // front = most recently used
  std::map<std::vector<int>, std::list<Entry>::iterator> index_;
};

}  // namespace jobprp
