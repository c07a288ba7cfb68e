#include "jobprp/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include "jobprp/error.hpp"

namespace jobprp {

namespace {

constexpr std::array<const char*, kFamilyCount> kFamilyTags = {
    "BASE_CAPACITY", "BASE_ASSIGN", "BASE_TOUCH", "BASE_FLOW", "BASE_SOURCE",
    "BASE_LINK",     "BASE_DEGREE", "SYM_ORDER",  "SYM_FORCE", "SYM_DIR",
    "FCAV",          "CA_BELOW",    "CA_ABOVE",   "AISLE",     "SUB",
    "AVR",           "PT",          "NR",         "CONNECTIVITY"};

constexpr std::array<const char*, 7> kGroupNames = {"DIR", "FCAV", "CA", "A", "SUB", "AVR", "PT"};

// Accumulates terms for one row, skipping variables that do not exist.
class RowBuilder {
 public:
  RowBuilder(Family f, Sense s, double rhs) { row_.family = f, row_.sense = s, row_.rhs = rhs; }
  RowBuilder& add(int var, double coef) {
    if (var >= 0) row_.terms.push_back({var, coef});
    return *this;
  }
  ConstraintRow done() {
    // Merge duplicate variables so each appears once.
    std::sort(row_.terms.begin(), row_.terms.end(),
              [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const Term& t : row_.terms) {
      if (!merged.empty() && merged.back().var == t.var) {
        merged.back().coef += t.coef;
      } else {
        merged.push_back(t);
      }
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    row_.terms = std::move(merged);
    return std::move(row_);
  }

 private:
  ConstraintRow row_;
};

int x_var(const ModelSpec& m, const PickingGraph& g, int t, int u, int v) {
  const auto e = g.find_arc(u, v);
  return e ? m.cat.x[static_cast<std::size_t>(t)][static_cast<std::size_t>(*e)] : -1;
}

int order_count(const Instance& inst) { return inst.num_orders(); }

}  // namespace

std::string family_tag(Family f) { return kFamilyTags[static_cast<std::size_t>(f)]; }

std::optional<Family> family_from_tag(const std::string& tag) {
  for (int i = 0; i < kFamilyCount; ++i) {
    if (tag == kFamilyTags[static_cast<std::size_t>(i)]) return static_cast<Family>(i);
  }
  return std::nullopt;
}

std::string group_name(CutGroup g) { return kGroupNames[static_cast<std::size_t>(g)]; }

std::optional<CutGroup> group_from_name(const std::string& name) {
  std::string upper;
  for (char c : name) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (CutGroup g : kAllCutGroups) {
    if (upper == group_name(g)) return g;
  }
  return std::nullopt;
}

FamilySet FamilySet::all() {
  FamilySet s;
  s.enabled.fill(true);
  return s;
}

FamilySet FamilySet::none() { return FamilySet{}; }

FamilySet FamilySet::with(CutGroup g, bool on) const {
  FamilySet s = *this;
  s.enabled[static_cast<std::size_t>(g)] = on;
  return s;
}

FamilySet FamilySet::parse(const std::string& text) {
  if (text == "all") return all();
  if (text == "none" || text.empty()) return none();
  FamilySet s;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto g = group_from_name(item);
    if (!g) throw InvalidInput("unknown inequality family '" + item + "'");
    s.enabled[static_cast<std::size_t>(*g)] = true;
  }
  return s;
}

std::string FamilySet::str() const {
  if (*this == all()) return "all";
  if (*this == none()) return "none";
  std::string out;
  for (CutGroup g : kAllCutGroups) {
    if (!has(g)) continue;
    if (!out.empty()) out += ",";
    out += group_name(g);
  }
  return out;
}

int ModelSpec::add_var(Variable v) {
  vars.push_back(std::move(v));
  return static_cast<int>(vars.size()) - 1;
}

std::map<Family, int> ModelSpec::row_counts() const {
  std::map<Family, int> counts;
  for (const auto& r : rows) ++counts[r.family];
  return counts;
}

OrderGeometry compute_geometry(const Instance& inst) {
  const PickingGraph& g = inst.graph;
  const int wa = g.num_aisles();
  const int wc = g.num_cross_aisles();
  OrderGeometry geo;
  geo.phi.assign(static_cast<std::size_t>(wa) + 1, {});
  geo.gamma.assign(static_cast<std::size_t>(wc) + 1, {});
  geo.theta.assign(static_cast<std::size_t>(wa) + 1, {});
  geo.omega.assign(static_cast<std::size_t>(g.num_vertices()), {});
  geo.psi.assign(static_cast<std::size_t>(g.num_vertices()), {});
  for (int o = 0; o < order_count(inst); ++o) {
    const auto& vs = inst.order_vertices[static_cast<std::size_t>(o)];
    int west = wa + 1;
    int east = 0;
    int south = 0;
    for (int v : vs) {
      const Vertex& vx = g.vertex(v);
      west = std::min(west, vx.aisle);
      east = std::max(east, vx.aisle);
      south = std::max(south, vx.cross);
      geo.omega[static_cast<std::size_t>(v)].push_back(o);
      geo.psi[static_cast<std::size_t>(v)].push_back(o);
    }
    for (int a = 1; a <= wa; ++a) {
      const bool inside = std::all_of(vs.begin(), vs.end(), [&](int v) {
        return g.vertex(v).aisle == a && g.vertex(v).cross == 1;
      });
      if (!inside) geo.phi[static_cast<std::size_t>(a)].push_back(o);
    }
    for (int c = 1; c <= south; ++c) geo.gamma[static_cast<std::size_t>(c)].push_back(o);
    for (int a = west + 1; a <= east; ++a) geo.theta[static_cast<std::size_t>(a)].push_back(o);
  }
  return geo;
}

ModelSpec build_base_model(const Instance& inst) {
  validate(inst);
  const PickingGraph& g = inst.graph;
  const int T = inst.fleet;
  const int n = g.num_vertices();
  const int na = g.num_arcs();
  const int no = order_count(inst);

  ModelSpec m;
  auto& cat = m.cat;
  cat.trolleys = T;
  cat.x.assign(static_cast<std::size_t>(T), std::vector<int>(static_cast<std::size_t>(na), -1));
  cat.z.assign(static_cast<std::size_t>(no), std::vector<int>(static_cast<std::size_t>(T), -1));
  cat.alpha.assign(static_cast<std::size_t>(T), -1);
  cat.y.assign(static_cast<std::size_t>(T), std::vector<int>(static_cast<std::size_t>(n), -1));
  cat.g = cat.y;
  cat.m_north = cat.y;
  cat.m_south = cat.y;

  for (int t = 0; t < T; ++t) {
    const std::string ts = std::to_string(t + 1);
    for (int e = 0; e < na; ++e) {
      const Arc& a = g.arc(e);
      cat.x[t][e] = m.add_var({"x_" + ts + "_" + std::to_string(a.tail) + "_" + std::to_string(a.head),
                               VarType::Binary, 0.0, 1.0, static_cast<double>(a.length.dm())});
    }
  }
  for (int o = 0; o < no; ++o) {
    for (int t = 0; t < T; ++t) {
      cat.z[o][t] = m.add_var({"z_" + std::to_string(o + 1) + "_" + std::to_string(t + 1),
                               VarType::Binary, 0.0, 1.0, 0.0});
    }
  }
  for (int t = 0; t < T; ++t) {
    const std::string ts = std::to_string(t + 1);
    cat.alpha[t] = m.add_var({"alpha_" + ts, VarType::Continuous, 0.0, 1.0, 0.0});
    for (int v = 0; v < n; ++v) {
      cat.y[t][v] = m.add_var({"y_" + ts + "_" + std::to_string(v), VarType::Continuous, 0.0, 1.0, 0.0});
    }
    for (int v = 0; v < n; ++v) {
      cat.g[t][v] = m.add_var({"g_" + ts + "_" + std::to_string(v), VarType::Integer, 0.0,
                               static_cast<double>(g.out_arcs(v).size()), 0.0});
    }
  }

  for (int t = 0; t < T; ++t) {
    const auto& x = cat.x[t];
    const int alpha = cat.alpha[t];

    RowBuilder cap(Family::BaseCapacity, Sense::LessEqual, 0.0);
    for (int o = 0; o < no; ++o) cap.add(cat.z[o][t], inst.orders[o].baskets);
    cap.add(alpha, -inst.trolley_capacity);
    m.add_row(cap.done());

    for (int o = 0; o < no; ++o) {
      for (int v : inst.order_vertices[o]) {
        RowBuilder touch(Family::BaseTouch, Sense::GreaterEqual, 0.0);
        for (int e : g.out_arcs(v)) touch.add(x[e], 1.0);
        touch.add(cat.z[o][t], -1.0);
        m.add_row(touch.done());
      }
    }

    for (int v = 0; v < n; ++v) {
      RowBuilder flow(Family::BaseFlow, Sense::Equal, 0.0);
      for (int e : g.out_arcs(v)) flow.add(x[e], 1.0);
      for (int e : g.in_arcs(v)) flow.add(x[e], -1.0);
      m.add_row(flow.done());
    }

    RowBuilder leave(Family::BaseSource, Sense::Equal, 0.0);
    for (int e : g.out_arcs(g.origin())) leave.add(x[e], 1.0);
    leave.add(alpha, -1.0);
    m.add_row(leave.done());
    RowBuilder enter(Family::BaseSource, Sense::Equal, 0.0);
    for (int e : g.in_arcs(g.origin())) enter.add(x[e], 1.0);
    enter.add(alpha, -1.0);
    m.add_row(enter.done());

    for (int e = 0; e < na; ++e) {
      m.add_row(RowBuilder(Family::BaseLink, Sense::LessEqual, 0.0).add(x[e], 1.0).add(alpha, -1.0).done());
    }
    for (int o = 0; o < no; ++o) {
      m.add_row(RowBuilder(Family::BaseLink, Sense::LessEqual, 0.0)
                    .add(cat.z[o][t], 1.0)
                    .add(alpha, -1.0)
                    .done());
    }
    RowBuilder some(Family::BaseLink, Sense::GreaterEqual, 0.0);
    for (int o = 0; o < no; ++o) some.add(cat.z[o][t], 1.0);
    some.add(alpha, -1.0);
    m.add_row(some.done());
    for (int v = 0; v < n; ++v) {
      m.add_row(RowBuilder(Family::BaseLink, Sense::LessEqual, 0.0)
                    .add(cat.y[t][v], 1.0)
                    .add(alpha, -1.0)
                    .done());
    }

    for (int v = 0; v < n; ++v) {
      RowBuilder deg(Family::BaseDegree, Sense::Equal, 0.0);
      for (int e : g.out_arcs(v)) deg.add(x[e], 1.0);
      deg.add(cat.g[t][v], -1.0);
      m.add_row(deg.done());
    }
    for (int e = 0; e < na; ++e) {
      m.add_row(RowBuilder(Family::BaseDegree, Sense::GreaterEqual, 0.0)
                    .add(cat.y[t][g.arc(e).tail], 1.0)
                    .add(x[e], -1.0)
                    .done());
    }
  }

  for (int o = 0; o < no; ++o) {
    RowBuilder assign(Family::BaseAssign, Sense::Equal, 1.0);
    for (int t = 0; t < T; ++t) assign.add(cat.z[o][t], 1.0);
    m.add_row(assign.done());
  }
  return m;
}

void add_symmetry(ModelSpec& m, const Instance& inst) {
  const int T = m.cat.trolleys;
  for (int o = 0; o < std::min(T, order_count(inst)); ++o) {
    RowBuilder r(Family::SymOrder, Sense::GreaterEqual, 1.0);
    for (int t = 0; t <= o; ++t) r.add(m.cat.z[o][t], 1.0);
    m.add_row(r.done());
  }
  const int B = inst.trolley_capacity;
  m.forced_trolleys = std::min(T, (inst.total_baskets() + B - 1) / B);
  for (int t = 0; t < m.forced_trolleys; ++t) {
    m.add_row(RowBuilder(Family::SymForce, Sense::Equal, 1.0).add(m.cat.alpha[t], 1.0).done());
  }
}

void add_direction(ModelSpec& m, const Instance& inst) {
  const PickingGraph& g = inst.graph;
  const int s = g.origin();
  for (int t = 0; t < m.cat.trolleys; ++t) {
    for (int a = 2; a <= g.num_aisles(); ++a) {
      RowBuilder r(Family::SymDir, Sense::GreaterEqual, 0.0);
      for (int k = a; k <= g.num_aisles(); ++k) {
        r.add(x_var(m, g, t, g.artificial(k, 1), s), 1.0);
        r.add(x_var(m, g, t, s, g.artificial(k, 1)), -1.0);
      }
      m.add_row(r.done());
    }
  }
}

void add_fcav(ModelSpec& m, const Instance& inst, const OrderGeometry& geo) {
  const PickingGraph& g = inst.graph;
  const int s = g.origin();
  const int wa = g.num_aisles();
  for (int t = 0; t < m.cat.trolleys; ++t) {
    for (int a = 1; a <= wa; ++a) {
      const int top = g.artificial(a, 1);
      const int first = g.first_in_subaisle(a, 1);
      m.add_row(RowBuilder(Family::Fcav, Sense::GreaterEqual, 0.0)
                    .add(x_var(m, g, t, top, first), 1.0)
                    .add(x_var(m, g, t, s, top), -1.0)
                    .done());
      m.add_row(RowBuilder(Family::Fcav, Sense::GreaterEqual, 0.0)
                    .add(x_var(m, g, t, first, top), 1.0)
                    .add(x_var(m, g, t, top, s), -1.0)
                    .done());
      for (int o : geo.phi[a]) {
        RowBuilder r(Family::Fcav, Sense::GreaterEqual, -1.0);
        r.add(x_var(m, g, t, g.last_in_subaisle(a, 1), g.artificial(a, 2)), 1.0);
        if (a > 1) r.add(x_var(m, g, t, top, g.artificial(a - 1, 1)), 1.0);
        if (a < wa) r.add(x_var(m, g, t, top, g.artificial(a + 1, 1)), 1.0);
        r.add(x_var(m, g, t, s, top), -1.0);
        r.add(m.cat.z[o][t], -1.0);
        m.add_row(r.done());
      }
    }
  }
}

void add_cross_aisle(ModelSpec& m, const Instance& inst, const OrderGeometry& geo) {
  const PickingGraph& g = inst.graph;
  const int wa = g.num_aisles();
  const int wc = g.num_cross_aisles();
  for (int t = 0; t < m.cat.trolleys; ++t) {
    for (int c = 1; c < wc; ++c) {
      const auto down = [&](RowBuilder& r, double coef) {
        for (int a = 1; a <= wa; ++a) {
          r.add(x_var(m, g, t, g.artificial(a, c), g.first_in_subaisle(a, c)), coef);
        }
      };
      for (int o : geo.gamma[c]) {
        RowBuilder r(Family::CaBelow, Sense::GreaterEqual, 0.0);
        down(r, 1.0);
        r.add(m.cat.z[o][t], -1.0);
        m.add_row(r.done());
      }
      RowBuilder balance(Family::CaBelow, Sense::Equal, 0.0);
      down(balance, -1.0);
      for (int a = 1; a <= wa; ++a) {
        balance.add(x_var(m, g, t, g.first_in_subaisle(a, c), g.artificial(a, c)), 1.0);
      }
      m.add_row(balance.done());
    }
    for (int c = 2; c <= wc; ++c) {
      const auto down = [&](RowBuilder& r, double coef) {
        for (int a = 1; a <= wa; ++a) {
          r.add(x_var(m, g, t, g.last_in_subaisle(a, c - 1), g.artificial(a, c)), coef);
        }
      };
      for (int o : geo.gamma[c]) {
        RowBuilder r(Family::CaAbove, Sense::GreaterEqual, 0.0);
        down(r, 1.0);
        r.add(m.cat.z[o][t], -1.0);
        m.add_row(r.done());
      }
      RowBuilder balance(Family::CaAbove, Sense::Equal, 0.0);
      down(balance, -1.0);
      for (int a = 1; a <= wa; ++a) {
        balance.add(x_var(m, g, t, g.artificial(a, c), g.last_in_subaisle(a, c - 1)), 1.0);
      }
      m.add_row(balance.done());
    }
  }
}

void add_aisle(ModelSpec& m, const Instance& inst, const OrderGeometry& geo) {
  const PickingGraph& g = inst.graph;
  for (int t = 0; t < m.cat.trolleys; ++t) {
    for (int a = 2; a <= g.num_aisles(); ++a) {
      for (int o : geo.theta[a]) {
        RowBuilder r(Family::Aisle, Sense::GreaterEqual, 0.0);
        for (int c = 1; c <= g.num_cross_aisles(); ++c) {
          const int west = g.artificial(a - 1, c);
          const int east = g.artificial(a, c);
          r.add(x_var(m, g, t, west, east), 1.0).add(x_var(m, g, t, east, west), 1.0);
        }
        r.add(m.cat.z[o][t], -1.0);
        m.add_row(r.done());
      }
    }
  }
}

void add_subaisle(ModelSpec& m, const Instance& inst, const OrderGeometry& geo) {
  const PickingGraph& g = inst.graph;
  auto& cat = m.cat;
  for (int t = 0; t < cat.trolleys; ++t) {
    const std::string ts = std::to_string(t + 1);
    for (int v : g.location_vertices()) {
      cat.m_north[t][v] = m.add_var({"mn_" + ts + "_" + std::to_string(v), VarType::Continuous, 0.0, 1.0, 0.0});
      cat.m_south[t][v] = m.add_var({"ms_" + ts + "_" + std::to_string(v), VarType::Continuous, 0.0, 1.0, 0.0});
    }
    for (int a = 1; a <= g.num_aisles(); ++a) {
      for (int c = 1; c < g.num_cross_aisles(); ++c) {
        const auto& col = g.subaisle(a, c);
        if (col.empty()) continue;
        const auto R = col.size();
        const auto& mn = cat.m_north[t];
        const auto& ms = cat.m_south[t];
        m.add_row(RowBuilder(Family::Sub, Sense::Equal, 0.0)
                      .add(mn[col[0]], 1.0)
                      .add(x_var(m, g, t, g.artificial(a, c), col[0]), -1.0)
                      .done());
        for (std::size_t r = 1; r < R; ++r) {
          m.add_row(RowBuilder(Family::Sub, Sense::LessEqual, 0.0)
                        .add(mn[col[r]], 1.0)
                        .add(x_var(m, g, t, col[r - 1], col[r]), -1.0)
                        .done());
          m.add_row(RowBuilder(Family::Sub, Sense::LessEqual, 0.0)
                        .add(mn[col[r]], 1.0)
                        .add(mn[col[r - 1]], -1.0)
                        .done());
        }
        m.add_row(RowBuilder(Family::Sub, Sense::Equal, 0.0)
                      .add(ms[col[R - 1]], 1.0)
                      .add(x_var(m, g, t, g.artificial(a, c + 1), col[R - 1]), -1.0)
                      .done());
        for (std::size_t r = 1; r < R; ++r) {
          m.add_row(RowBuilder(Family::Sub, Sense::LessEqual, 0.0)
                        .add(ms[col[r - 1]], 1.0)
                        .add(x_var(m, g, t, col[r], col[r - 1]), -1.0)
                        .done());
          m.add_row(RowBuilder(Family::Sub, Sense::LessEqual, 0.0)
                        .add(ms[col[r - 1]], 1.0)
                        .add(ms[col[r]], -1.0)
                        .done());
        }
      }
    }
    for (int p : g.location_vertices()) {
      for (int o : geo.omega[p]) {
        m.add_row(RowBuilder(Family::Sub, Sense::GreaterEqual, 0.0)
                      .add(cat.m_north[t][p], 1.0)
                      .add(cat.m_south[t][p], 1.0)
                      .add(cat.z[o][t], -1.0)
                      .done());
      }
    }
  }
}

void add_avr(ModelSpec& m, const Instance& inst, bool subaisle_ends) {
  const PickingGraph& g = inst.graph;
  for (int t = 0; t < m.cat.trolleys; ++t) {
    const auto& x = m.cat.x[t];
    for (int e = 0; e < g.num_arcs(); ++e) {
      const int i = g.arc(e).tail;
      const int k = g.arc(e).head;
      if (!g.is_artificial(i) || !g.is_artificial(k)) continue;
      RowBuilder r(Family::Avr, Sense::GreaterEqual, 0.0);
      for (int f : g.out_arcs(k)) {
        if (g.arc(f).head != i) r.add(x[f], 1.0);
      }
      r.add(x[e], -1.0);
      m.add_row(r.done());
    }
    if (!subaisle_ends) continue;
    // Reversal at either end of a non-empty subaisle. Empty subaisles are
    // artificial-artificial arcs and covered above.
    const auto end_rows = [&](int v, int inner) {
      RowBuilder onward(Family::Avr, Sense::GreaterEqual, 0.0);
      for (int f : g.out_arcs(v)) {
        if (g.arc(f).head != inner) onward.add(x[f], 1.0);
      }
      onward.add(x_var(m, g, t, inner, v), -1.0);
      m.add_row(onward.done());
      RowBuilder from(Family::Avr, Sense::GreaterEqual, 0.0);
      for (int f : g.in_arcs(v)) {
        if (g.arc(f).tail != inner) from.add(x[f], 1.0);
      }
      from.add(x_var(m, g, t, v, inner), -1.0);
      m.add_row(from.done());
    };
    for (int a = 1; a <= g.num_aisles(); ++a) {
      for (int c = 1; c < g.num_cross_aisles(); ++c) {
        if (!g.subaisle(a, c).empty()) end_rows(g.artificial(a, c), g.first_in_subaisle(a, c));
      }
      for (int c = 2; c <= g.num_cross_aisles(); ++c) {
        if (!g.subaisle(a, c - 1).empty()) end_rows(g.artificial(a, c), g.last_in_subaisle(a, c - 1));
      }
    }
  }
}

void add_pass_through(ModelSpec& m, const Instance& inst, const OrderGeometry& geo) {
  const PickingGraph& g = inst.graph;
  for (int t = 0; t < m.cat.trolleys; ++t) {
    for (int a = 1; a <= g.num_aisles(); ++a) {
      for (int c = 1; c < g.num_cross_aisles(); ++c) {
        const auto& col = g.subaisle(a, c);
        for (std::size_t r = 0; r < col.size(); ++r) {
          const int p = col[r];
          const int prev = r == 0 ? g.artificial(a, c) : col[r - 1];
          const int next = r + 1 == col.size() ? g.artificial(a, c + 1) : col[r + 1];
          const auto pair = [&](int in_tail, int out_head) {
            for (double side : {1.0, -1.0}) {
              RowBuilder row(Family::Pt, Sense::GreaterEqual, 0.0);
              row.add(x_var(m, g, t, in_tail, p), side);
              row.add(x_var(m, g, t, p, out_head), -side);
              for (int o : geo.psi[p]) row.add(m.cat.z[o][t], 1.0);
              m.add_row(row.done());
            }
          };
          pair(prev, next);
          pair(next, prev);
        }
      }
    }
  }
}

void add_no_reversal_pairs(ModelSpec& m, const Instance& inst) {
  const PickingGraph& g = inst.graph;
  for (int t = 0; t < m.cat.trolleys; ++t) {
    for (int a = 1; a <= g.num_aisles(); ++a) {
      for (int c = 1; c < g.num_cross_aisles(); ++c) {
        const auto& col = g.subaisle(a, c);
        if (col.empty()) continue;
        if (col.size() != 1) throw InvalidInput("no-reversal model needs one vertex per subaisle");
        const int mid = col[0];
        const int north = g.artificial(a, c);
        const int south = g.artificial(a, c + 1);
        m.add_row(RowBuilder(Family::Nr, Sense::Equal, 0.0)
                      .add(x_var(m, g, t, north, mid), 1.0)
                      .add(x_var(m, g, t, mid, south), -1.0)
                      .done());
        m.add_row(RowBuilder(Family::Nr, Sense::Equal, 0.0)
                      .add(x_var(m, g, t, south, mid), 1.0)
                      .add(x_var(m, g, t, mid, north), -1.0)
                      .done());
      }
    }
  }
}

ModelSpec build_model(const Instance& inst, const ModelOptions& options) {
  ModelSpec m = build_base_model(inst);
  m.options = options;
  if (options.symmetry) add_symmetry(m, inst);
  const FamilySet& f = options.families;
  const OrderGeometry geo = compute_geometry(inst);
  if (f.has(CutGroup::Direction)) add_direction(m, inst);
  if (f.has(CutGroup::Fcav)) add_fcav(m, inst, geo);
  if (f.has(CutGroup::CrossAisle)) add_cross_aisle(m, inst, geo);
  if (f.has(CutGroup::Aisle)) add_aisle(m, inst, geo);
  if (f.has(CutGroup::Subaisle)) add_subaisle(m, inst, geo);
  if (f.has(CutGroup::Avr)) add_avr(m, inst, !options.no_reversal);
  if (f.has(CutGroup::PassThrough)) add_pass_through(m, inst, geo);
  if (options.no_reversal) add_no_reversal_pairs(m, inst);
  return m;
}

ConstraintRow connectivity_row(const VariableCatalog& cat, const PickingGraph& g, int t,
                               std::span<const int> members, int representative) {
  std::vector<char> in(static_cast<std::size_t>(g.num_vertices()), 0);
  for (int v : members) in[static_cast<std::size_t>(v)] = 1;
  RowBuilder r(Family::Connectivity, Sense::GreaterEqual, 0.0);
  for (int v : members) {
    r.add(cat.g[t][v], 1.0);
    for (int e : g.out_arcs(v)) {
      if (in[static_cast<std::size_t>(g.arc(e).head)]) r.add(cat.x[t][e], -1.0);
    }
  }
  r.add(cat.y[t][representative], -1.0);
  return r.done();
}

CollapsedInstance collapse_subaisles(const Instance& inst) {
  const PickingGraph& g = inst.graph;
  std::int64_t min_key = 0;
  for (const Vertex& v : g.vertices()) min_key = std::min(min_key, v.key);

  CollapsedInstance out;
  std::vector<Vertex> vertices;
  std::vector<int> new_id(static_cast<std::size_t>(g.num_vertices()), -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (g.is_location(v)) continue;
    new_id[static_cast<std::size_t>(v)] = static_cast<int>(vertices.size());
    vertices.push_back(g.vertex(v));
  }
  std::vector<Arc> arcs;
  for (const Arc& a : g.arcs()) {
    if (g.is_location(a.tail) || g.is_location(a.head)) continue;
    arcs.push_back(Arc{new_id[a.tail], new_id[a.head], a.length, a.hidden});
  }
  std::vector<int> mid_of(static_cast<std::size_t>(g.num_vertices()), -1);
  for (int a = 1; a <= g.num_aisles(); ++a) {
    for (int c = 1; c < g.num_cross_aisles(); ++c) {
      const auto& col = g.subaisle(a, c);
      if (col.empty()) continue;
      std::vector<int> chain{g.artificial(a, c)};
      chain.insert(chain.end(), col.begin(), col.end());
      chain.push_back(g.artificial(a, c + 1));
      Distance length;
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        length += g.arc(g.arc_between(chain[i], chain[i + 1])).length;
      }
      Vertex mid;
      mid.kind = VertexKind::Location;
      mid.aisle = a;
      mid.cross = c;
      mid.rank = 1;
      mid.x = g.vertex(chain.front()).x;
      mid.y = (g.vertex(chain.front()).y + g.vertex(chain.back()).y) / 2.0;
      mid.key = --min_key;
      for (int v : col) {
        const auto& p = g.vertex(v).products;
        mid.products.insert(mid.products.end(), p.begin(), p.end());
      }
      std::sort(mid.products.begin(), mid.products.end());
      const int id = static_cast<int>(vertices.size());
      vertices.push_back(std::move(mid));
      for (int v : col) mid_of[static_cast<std::size_t>(v)] = id;
      const Distance north = Distance::decimetres(length.dm() / 2);
      const Distance south = length - north;
      const int nv = new_id[static_cast<std::size_t>(chain.front())];
      const int sv = new_id[static_cast<std::size_t>(chain.back())];
      arcs.push_back(Arc{nv, id, north, {}});
      arcs.push_back(Arc{id, nv, north, {}});
      arcs.push_back(Arc{id, sv, south, {}});
      arcs.push_back(Arc{sv, id, south, {}});
      out.chain[id] = std::move(chain);
    }
  }
  Instance& ci = out.instance;
  ci.name = inst.name;
  ci.layout = inst.layout;
  ci.graph = PickingGraph(g.num_aisles(), g.num_cross_aisles(), std::move(vertices), std::move(arcs));
  ci.orders = inst.orders;
  for (const auto& vs : inst.order_vertices) {
    std::set<int> mids;
    for (int v : vs) mids.insert(mid_of[static_cast<std::size_t>(v)]);
    ci.order_vertices.emplace_back(mids.begin(), mids.end());
  }
  ci.trolley_capacity = inst.trolley_capacity;
  ci.fleet = inst.fleet;
  ci.basket_item_capacity = inst.basket_item_capacity;
  return out;
}

Walk expand_collapsed_walk(const CollapsedInstance& ci, const Instance& original, const Walk& walk) {
  const PickingGraph& cg = ci.instance.graph;
  const PickingGraph& og = original.graph;
  Walk out;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const int v = walk[i];
    const auto it = ci.chain.find(v);
    if (it == ci.chain.end()) {
      out.push_back(*og.vertex_by_key(cg.vertex(v).key));
      continue;
    }
    if (i == 0 || i + 1 == walk.size()) throw StructuralError("walk cannot start inside a subaisle");
    const auto& chain = it->second;
    const int from = *og.vertex_by_key(cg.vertex(walk[i - 1]).key);
    const int to = *og.vertex_by_key(cg.vertex(walk[i + 1]).key);
    if (from == chain.front() && to == chain.back()) {
      out.insert(out.end(), chain.begin() + 1, chain.end() - 1);
    } else if (from == chain.back() && to == chain.front()) {
      out.insert(out.end(), chain.rbegin() + 1, chain.rend() - 1);
    } else {
      throw StructuralError("walk reverses inside a collapsed subaisle");
    }
  }
  return out;
}

NoReversalModel apply_no_reversal(const Instance& inst, ModelOptions options) {
  NoReversalModel out{collapse_subaisles(inst), {}};
  options.no_reversal = true;
  out.model = build_model(out.collapsed.instance, options);
  return out;
}

std::vector<double> encode_plan(const ModelSpec& m, const Instance& inst, const Plan& plan) {
  const PickingGraph& g = inst.graph;
  const auto& cat = m.cat;
  std::vector<double> val(m.vars.size(), 0.0);
  if (static_cast<int>(plan.batches.size()) > cat.trolleys || plan.walks.size() != plan.batches.size()) {
    throw InvalidInput("plan does not match the model's trolley count");
  }
  for (std::size_t t = 0; t < plan.batches.size(); ++t) {
    for (int o : plan.batches[t]) val[cat.z[o][t]] = 1.0;
    const Walk& w = plan.walks[t];
    if (w.empty()) continue;
    val[cat.alpha[t]] = 1.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      const int e = g.arc_between(w[i], w[i + 1]);
      if (val[cat.x[t][e]] != 0.0) throw StructuralError("walk repeats an arc");
      val[cat.x[t][e]] = 1.0;
      val[cat.y[t][w[i]]] = 1.0;
      val[cat.g[t][w[i]]] += 1.0;
    }
    if (cat.m_north[t].empty()) continue;
    const auto xv = [&](int u, int v) { return val[cat.x[t][g.arc_between(u, v)]]; };
    for (int a = 1; a <= g.num_aisles(); ++a) {
      for (int c = 1; c < g.num_cross_aisles(); ++c) {
        const auto& col = g.subaisle(a, c);
        if (col.empty() || cat.m_north[t][col[0]] < 0) continue;
        double run = 1.0;
        int prev = g.artificial(a, c);
        for (int v : col) {
          run = std::min(run, xv(prev, v));
          val[cat.m_north[t][v]] = run;
          prev = v;
        }
        run = 1.0;
        prev = g.artificial(a, c + 1);
        for (auto it = col.rbegin(); it != col.rend(); ++it) {
          run = std::min(run, xv(prev, *it));
          val[cat.m_south[t][*it]] = run;
          prev = *it;
        }
      }
    }
  }
  return val;
}

Plan canonical_plan(const Instance& inst, Plan plan) {
  const PickingGraph& g = inst.graph;
  std::vector<std::pair<std::vector<int>, Walk>> trolleys;
  for (std::size_t t = 0; t < plan.batches.size(); ++t) {
    auto batch = plan.batches[t];
    Walk w = plan.walks[t];
    std::sort(batch.begin(), batch.end());
    if (w.size() >= 3 && g.vertex(w[1]).aisle > g.vertex(w[w.size() - 2]).aisle) {
      std::reverse(w.begin(), w.end());
    }
    trolleys.emplace_back(std::move(batch), std::move(w));
  }
  std::stable_sort(trolleys.begin(), trolleys.end(), [](const auto& a, const auto& b) {
    if (a.first.empty() != b.first.empty()) return b.first.empty();
    if (a.first.empty()) return false;
    return a.first.front() < b.first.front();
  });
  Plan out;
  for (auto& [batch, w] : trolleys) {
    out.batches.push_back(std::move(batch));
    out.walks.push_back(std::move(w));
  }
  return out;
}

double row_activity(const ConstraintRow& r, std::span<const double> values) {
  double sum = 0.0;
  for (const Term& t : r.terms) sum += t.coef * values[static_cast<std::size_t>(t.var)];
  return sum;
}

double row_violation(const ConstraintRow& r, std::span<const double> values) {
  const double act = row_activity(r, values);
  switch (r.sense) {
    case Sense::LessEqual:
      return std::max(0.0, act - r.rhs);
    case Sense::GreaterEqual:
      return std::max(0.0, r.rhs - act);
    case Sense::Equal:
      return std::abs(act - r.rhs);
  }
  return 0.0;
}

std::vector<RowViolation> replay(const ModelSpec& m, std::span<const double> values, double tol) {
  std::vector<RowViolation> out;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const double v = row_violation(m.rows[i], values);
    if (v > tol) out.push_back({static_cast<int>(i), m.rows[i].family, v});
  }
  for (std::size_t j = 0; j < m.vars.size(); ++j) {
    const double v = values[j];
    const auto& var = m.vars[j];
    const bool integral = var.type == VarType::Continuous || std::abs(v - std::round(v)) <= tol;
    if (v < var.lower - tol || v > var.upper + tol || !integral) {
      out.push_back({-1 - static_cast<int>(j), Family::BaseLink, 1.0});
    }
  }
  return out;
}

void write_lp(std::ostream& os, const ModelSpec& m) {
  const auto write_terms = [&](const std::vector<Term>& terms) {
    int on_line = 0;
    for (const Term& t : terms) {
      os << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << ' ' << m.vars[t.var].name;
      if (++on_line == 6) {
        os << "\n   ";
        on_line = 0;
      }
    }
    if (terms.empty()) os << " 0 " << m.vars.front().name;
  };
  os << "\\ jobprp model: " << m.vars.size() << " columns, " << m.rows.size() << " rows\n";
  os << "Minimize\n obj:";
  std::vector<Term> obj;
  for (std::size_t j = 0; j < m.vars.size(); ++j) {
    if (m.vars[j].cost != 0.0) obj.push_back({static_cast<int>(j), m.vars[j].cost});
  }
  write_terms(obj);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const auto& r = m.rows[i];
    os << ' ' << family_tag(r.family) << '_' << i << ':';
    write_terms(r.terms);
    os << (r.sense == Sense::LessEqual ? " <= " : r.sense == Sense::GreaterEqual ? " >= " : " = ")
       << r.rhs << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.type == VarType::Binary) continue;
    os << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
  }
  os << "General\n";
  for (const auto& v : m.vars) {
    if (v.type == VarType::Integer) os << ' ' << v.name << '\n';
  }
  os << "Binary\n";
  for (const auto& v : m.vars) {
    if (v.type == VarType::Binary) os << ' ' << v.name << '\n';
  }
  os << "End\n";
}

}  // namespace jobprp
