#include <doctest.h>

#include <set>
#include <sstream>

#include "jobprp/error.hpp"
#include "jobprp/model.hpp"
#include "jobprp/oracle.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

int count(const ModelSpec& m, Family f) {
  const auto counts = m.row_counts();
  const auto it = counts.find(f);
  return it == counts.end() ? 0 : it->second;
}

int total_order_vertices(const Instance& inst) {
  int n = 0;
  for (const auto& vs : inst.order_vertices) n += static_cast<int>(vs.size());
  return n;
}

ModelOptions only(CutGroup g) {
  ModelOptions o;
  o.families = FamilySet::none().with(g, true);
  o.symmetry = false;
  return o;
}

ModelOptions bare() {
  ModelOptions o;
  o.families = FamilySet::none();
  o.symmetry = false;
  return o;
}

void check_base_counts(const Instance& inst) {
  const ModelSpec m = build_base_model(inst);
  const int T = inst.fleet;
  const int V = inst.graph.num_vertices();
  const int A = inst.graph.num_arcs();
  const int O = inst.num_orders();
  CHECK(static_cast<int>(m.vars.size()) == T * (A + 1 + 2 * V) + O * T);
  CHECK(count(m, Family::BaseCapacity) == T);
  CHECK(count(m, Family::BaseTouch) == T * total_order_vertices(inst));
  CHECK(count(m, Family::BaseFlow) == T * V);
  CHECK(count(m, Family::BaseSource) == 2 * T);
  CHECK(count(m, Family::BaseLink) == T * (A + O + 1 + V));
  CHECK(count(m, Family::BaseDegree) == T * (V + A));
  CHECK(count(m, Family::BaseAssign) == O);
  CHECK(static_cast<int>(m.rows.size()) ==
        T * (1 + total_order_vertices(inst) + V + 2 + A + O + 1 + V + V + A) + O);
}

}  // namespace

TEST_CASE("base model on the four-vertex graph") {
  const auto layout = testing::small_layout(2, 1, 2, 1);
  const Instance inst = make_instance(layout, {testing::make_order(1, {testing::product_at_rank(layout, 0)})});
  REQUIRE(inst.graph.num_vertices() == 4);
  REQUIRE(inst.graph.num_arcs() == 6);
  const ModelSpec m = build_base_model(inst);
  CHECK(m.vars.size() == 16);
  CHECK(m.rows.size() == 1 + 1 + 4 + 2 + (6 + 1 + 1 + 4) + (4 + 6) + 1);
  check_base_counts(inst);

  int binaries = 0;
  int integers = 0;
  for (const auto& v : m.vars) {
    binaries += v.type == VarType::Binary;
    integers += v.type == VarType::Integer;
  }
  CHECK(binaries == 6 + 1);
  CHECK(integers == 4);
  // Degree variables are bounded by the out-degree.
  CHECK(m.vars[static_cast<std::size_t>(m.cat.g[0][inst.graph.origin()])].upper == 1.0);
  const int loc = inst.graph.location_vertices().front();
  CHECK(m.vars[static_cast<std::size_t>(m.cat.g[0][loc])].upper == 2.0);
}

TEST_CASE("base model counts match the closed forms") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    INFO("seed " << seed);
    check_base_counts(testing::tiny_instance(seed));
  }
}

TEST_CASE("arc costs are lengths in decimetres") {
  const Instance inst = testing::tiny_instance(2);
  const ModelSpec m = build_base_model(inst);
  for (int e = 0; e < inst.graph.num_arcs(); ++e) {
    CHECK(m.vars[static_cast<std::size_t>(m.cat.x[0][e])].cost ==
          static_cast<double>(inst.graph.arc(e).length.dm()));
  }
}

TEST_CASE("symmetry rows") {
  const auto& layout = testing::tiny_layout();
  std::vector<Order> orders;
  for (int i = 0; i < 4; ++i) {
    orders.push_back(testing::make_order(i + 1, {testing::product_at_rank(layout, 10 * i)}, 40 + (i < 2 ? 20 : 0)));
  }
  // Baskets 2, 2, 1, 1: six in total.
  const Instance inst = make_instance(layout, orders, 8, 3);
  REQUIRE(inst.total_baskets() == 6);
  const ModelSpec m = build_model(inst, bare());
  ModelSpec s = m;
  add_symmetry(s, inst);
  CHECK(s.forced_trolleys == 1);
  CHECK(count(s, Family::SymOrder) == 3);
  CHECK(count(s, Family::SymForce) == 1);
  for (const auto& r : s.rows) {
    if (r.family != Family::SymOrder) continue;
    CHECK(r.sense == Sense::GreaterEqual);
    CHECK(r.rhs == 1.0);
  }
  CHECK(s.rows[m.rows.size() + 2].terms.size() == 3);

  const Instance one = make_instance(layout, orders, 8, 1);
  ModelSpec s1 = build_model(one, bare());
  add_symmetry(s1, one);
  CHECK(count(s1, Family::SymOrder) == 1);
  CHECK(s1.forced_trolleys == 1);

  const Instance tight = make_instance(layout, orders, 2, 3);
  ModelSpec s3 = build_model(tight, bare());
  add_symmetry(s3, tight);
  CHECK(s3.forced_trolleys == 3);
}

TEST_CASE("order geometry sets") {
  const auto& layout = testing::tiny_layout();
  // Ranks: 0 is aisle 1 slot 1, 9 is aisle 1 slot 4 (second subaisle), 72 is aisle 3 slot 1.
  const std::vector<Order> orders{testing::make_order(1, {testing::product_at_rank(layout, 0)}),
                                  testing::make_order(2, {testing::product_at_rank(layout, 9),
                                                          testing::product_at_rank(layout, 72)}),
                                  testing::make_order(3, {testing::product_at_rank(layout, 72)})};
  const Instance inst = make_instance(layout, orders, 8, 2);
  const OrderGeometry geo = compute_geometry(inst);
  CHECK(geo.phi[1] == std::vector<int>{1, 2});
  CHECK(geo.phi[2] == std::vector<int>{0, 1, 2});
  CHECK(geo.phi[3] == std::vector<int>{0, 1});
  CHECK(geo.gamma[1] == std::vector<int>{0, 1, 2});
  CHECK(geo.gamma[2] == std::vector<int>{1});
  CHECK(geo.gamma[3].empty());
  CHECK(geo.theta[2] == std::vector<int>{1});
  CHECK(geo.theta[3] == std::vector<int>{1});
  for (int v : inst.graph.location_vertices()) {
    for (int o : geo.omega[static_cast<std::size_t>(v)]) {
      const auto& vs = inst.order_vertices[static_cast<std::size_t>(o)];
      CHECK(std::find(vs.begin(), vs.end(), v) != vs.end());
    }
  }
}

TEST_CASE("family row counts") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    INFO("seed " << seed);
    const Instance inst = testing::tiny_instance(seed);
    const PickingGraph& g = inst.graph;
    const OrderGeometry geo = compute_geometry(inst);
    const int T = inst.fleet;
    const int wa = g.num_aisles();
    const int wc = g.num_cross_aisles();
    const std::size_t base_vars = build_base_model(inst).vars.size();

    int phi = 0;
    for (int a = 1; a <= wa; ++a) phi += static_cast<int>(geo.phi[static_cast<std::size_t>(a)].size());
    CHECK(count(build_model(inst, only(CutGroup::Fcav)), Family::Fcav) == T * (2 * wa + phi));

    CHECK(count(build_model(inst, only(CutGroup::Direction)), Family::SymDir) == T * (wa - 1));

    int theta = 0;
    for (int a = 2; a <= wa; ++a) theta += static_cast<int>(geo.theta[static_cast<std::size_t>(a)].size());
    CHECK(count(build_model(inst, only(CutGroup::Aisle)), Family::Aisle) == T * theta);

    int below = 0;
    int above = 0;
    for (int c = 1; c < wc; ++c) below += 1 + static_cast<int>(geo.gamma[static_cast<std::size_t>(c)].size());
    for (int c = 2; c <= wc; ++c) above += 1 + static_cast<int>(geo.gamma[static_cast<std::size_t>(c)].size());
    const ModelSpec ca = build_model(inst, only(CutGroup::CrossAisle));
    CHECK(count(ca, Family::CaBelow) == T * below);
    CHECK(count(ca, Family::CaAbove) == T * above);

    const int locs = static_cast<int>(g.location_vertices().size());
    const ModelSpec sub = build_model(inst, only(CutGroup::Subaisle));
    CHECK(sub.vars.size() == base_vars + static_cast<std::size_t>(2 * T * locs));
    int nonempty = 0;
    for (int a = 1; a <= wa; ++a) {
      for (int c = 1; c < wc; ++c) nonempty += !g.subaisle(a, c).empty();
    }
    // Two end rows and four chain rows per vertex after the first, per subaisle.
    const int chain_rows = 2 * nonempty + 4 * (locs - nonempty);
    CHECK(count(sub, Family::Sub) == T * (chain_rows + total_order_vertices(inst)));

    int art_arcs = 0;
    for (const Arc& a : g.arcs()) art_arcs += g.is_artificial(a.tail) && g.is_artificial(a.head);
    CHECK(count(build_model(inst, only(CutGroup::Avr)), Family::Avr) == T * (art_arcs + 4 * nonempty));

    CHECK(count(build_model(inst, only(CutGroup::PassThrough)), Family::Pt) == T * 4 * locs);
  }
}

TEST_CASE("reversal rows at a corner have a single onward arc") {
  const auto layout = testing::small_layout(4, 2, 2, 1);
  const Instance inst = make_instance(layout, {testing::make_order(1, {testing::product_at_rank(layout, 0)})});
  const PickingGraph& g = inst.graph;
  // The south-east corner v(2,2) connects only to v(1,2) and, since subaisle
  // (2,1) is empty, straight up to v(2,1).
  const int corner = g.artificial(2, 2);
  REQUIRE(g.out_arcs(corner).size() == 2);
  const ModelSpec m = build_model(inst, only(CutGroup::Avr));
  const int into = m.cat.x[0][static_cast<std::size_t>(g.arc_between(g.artificial(1, 2), corner))];
  const int onward = m.cat.x[0][static_cast<std::size_t>(g.arc_between(corner, g.artificial(2, 1)))];
  bool found = false;
  for (const auto& r : m.rows) {
    if (r.family != Family::Avr || r.terms.size() != 2) continue;
    if (r.terms[0].var == into && r.terms[1].var == onward) {
      CHECK(r.terms[0].coef == -1.0);
      CHECK(r.terms[1].coef == 1.0);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("optimal plans satisfy every family") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    INFO("seed " << seed);
    const Instance inst = testing::tiny_instance(seed);
    const OracleResult opt = oracle_solve(inst);
    for (bool symmetry : {false, true}) {
      ModelOptions o;
      o.symmetry = symmetry;
      const ModelSpec m = build_model(inst, o);
      const auto values = encode_plan(m, inst, opt.plan);
      const auto bad = replay(m, values);
      for (const auto& v : bad) {
        INFO("row " << v.row << " family " << family_tag(v.family) << " by " << v.amount);
        CHECK(false);
      }
      double cost = 0.0;
      for (std::size_t j = 0; j < m.vars.size(); ++j) cost += m.vars[j].cost * values[j];
      CHECK(cost == static_cast<double>(opt.value.dm()));
    }
  }
}

TEST_CASE("a plan that skips a required vertex is caught") {
  const Instance inst = testing::tiny_instance(5);
  const OracleResult opt = oracle_solve(inst);
  Plan plan = opt.plan;
  REQUIRE(!plan.walks[0].empty());
  plan.walks[0] = {inst.graph.origin(), inst.graph.artificial(1, 1), inst.graph.origin()};
  const ModelSpec m = build_model(inst, bare());
  const auto bad = replay(m, encode_plan(m, inst, plan));
  REQUIRE(!bad.empty());
  bool touch = false;
  for (const auto& v : bad) touch = touch || v.family == Family::BaseTouch;
  CHECK(touch);
}

TEST_CASE("collapsing subaisles") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const CollapsedInstance ci = collapse_subaisles(inst);
    const PickingGraph& g = inst.graph;
    const PickingGraph& cg = ci.instance.graph;
    int nonempty = 0;
    for (int a = 1; a <= g.num_aisles(); ++a) {
      for (int c = 1; c < g.num_cross_aisles(); ++c) {
        nonempty += !g.subaisle(a, c).empty();
        CHECK(cg.subaisle(a, c).size() == (g.subaisle(a, c).empty() ? 0u : 1u));
      }
    }
    CHECK(static_cast<int>(cg.location_vertices().size()) == nonempty);
    CHECK(static_cast<int>(ci.chain.size()) == nonempty);
    CHECK_NOTHROW(validate(ci.instance));
    for (const auto& [mid, chain] : ci.chain) {
      Distance full;
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        full += g.arc(g.arc_between(chain[i], chain[i + 1])).length;
      }
      const Distance north = cg.arc(cg.arc_between(cg.artificial(cg.vertex(mid).aisle, cg.vertex(mid).cross), mid)).length;
      const Distance south =
          cg.arc(cg.arc_between(mid, cg.artificial(cg.vertex(mid).aisle, cg.vertex(mid).cross + 1))).length;
      CHECK(north + south == full);
    }
  }
}

TEST_CASE("walks on the collapsed graph expand to full traversals") {
  const auto& layout = testing::tiny_layout();
  const Instance inst = make_instance(layout, {testing::make_order(1, {testing::product_at_rank(layout, 0),
                                                                       testing::product_at_rank(layout, 3)})});
  const CollapsedInstance ci = collapse_subaisles(inst);
  const PickingGraph& cg = ci.instance.graph;
  const int mid = ci.chain.begin()->first;
  const Walk walk{cg.origin(),         cg.artificial(1, 1), mid, cg.artificial(1, 2), cg.artificial(2, 2),
                  cg.artificial(2, 1), cg.origin()};
  const Walk full = expand_collapsed_walk(ci, inst, walk);
  CHECK_NOTHROW(check_walk(inst.graph, full));
  CHECK(walk_length(inst.graph, full) == walk_length(cg, walk));
  CHECK(full.size() == walk.size() + 1);

  const Walk reversal{cg.origin(), cg.artificial(1, 1), mid, cg.artificial(1, 1), cg.origin()};
  CHECK_THROWS_AS(expand_collapsed_walk(ci, inst, reversal), StructuralError);
}

TEST_CASE("no-reversal model") {
  const Instance inst = testing::tiny_instance(8);
  const NoReversalModel nr = apply_no_reversal(inst);
  CHECK(nr.model.options.no_reversal);
  const PickingGraph& cg = nr.collapsed.instance.graph;
  CHECK(count(nr.model, Family::Nr) == 2 * nr.collapsed.instance.fleet * static_cast<int>(nr.collapsed.chain.size()));
  int art_arcs = 0;
  for (const Arc& a : cg.arcs()) art_arcs += cg.is_artificial(a.tail) && cg.is_artificial(a.head);
  CHECK(count(nr.model, Family::Avr) == nr.collapsed.instance.fleet * art_arcs);
  ModelSpec full = build_base_model(inst);
  CHECK_THROWS_AS(add_no_reversal_pairs(full, inst), InvalidInput);
}

TEST_CASE("connectivity row for a two-vertex set") {
  const Instance inst = testing::tiny_instance(3);
  const PickingGraph& g = inst.graph;
  const ModelSpec m = build_base_model(inst);
  const int i = g.artificial(1, 1);
  const int j = g.artificial(2, 1);
  const std::vector<int> members{i, j};
  const ConstraintRow r = connectivity_row(m.cat, g, 0, members, j);
  CHECK(r.family == Family::Connectivity);
  CHECK(r.sense == Sense::GreaterEqual);
  CHECK(r.rhs == 0.0);
  std::map<int, double> coef;
  for (const Term& t : r.terms) coef[t.var] = t.coef;
  CHECK(coef.size() == 5);
  CHECK(coef[m.cat.g[0][i]] == 1.0);
  CHECK(coef[m.cat.g[0][j]] == 1.0);
  CHECK(coef[m.cat.y[0][j]] == -1.0);
  CHECK(coef[m.cat.x[0][g.arc_between(i, j)]] == -1.0);
  CHECK(coef[m.cat.x[0][g.arc_between(j, i)]] == -1.0);
}

TEST_CASE("canonical plans") {
  const Instance inst = testing::tiny_instance(9, {.min_orders = 3, .max_orders = 3, .fixed_fleet = 3});
  const OracleResult opt = oracle_solve(inst);
  Plan shuffled = opt.plan;
  std::reverse(shuffled.batches.begin(), shuffled.batches.end());
  std::reverse(shuffled.walks.begin(), shuffled.walks.end());
  for (auto& w : shuffled.walks) std::reverse(w.begin(), w.end());
  const Plan back = canonical_plan(inst, shuffled);
  CHECK(back.batches == opt.plan.batches);
  CHECK(back.walks == opt.plan.walks);
  bool idle_seen = false;
  for (const auto& b : back.batches) {
    if (b.empty()) idle_seen = true;
    else CHECK_FALSE(idle_seen);
  }
}

TEST_CASE("LP export") {
  const Instance inst = testing::tiny_instance(4);
  const ModelSpec m = build_model(inst);
  std::ostringstream os;
  write_lp(os, m);
  const std::string lp = os.str();
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Subject To") != std::string::npos);
  CHECK(lp.find("General") != std::string::npos);
  CHECK(lp.rfind("End\n") == lp.size() - 4);
  CHECK(lp.find(" FCAV_") != std::string::npos);
  std::istringstream in(lp);
  std::string line;
  int row_lines = 0;
  int general = 0;
  bool in_general = false;
  while (std::getline(in, line)) {
    if (line == "General") in_general = true;
    else if (line == "Binary") in_general = false;
    else if (in_general) ++general;
    const auto colon = line.find(':');
    if (colon != std::string::npos && line.rfind(" obj:", 0) != 0 && line[0] == ' ') ++row_lines;
  }
  CHECK(row_lines == static_cast<int>(m.rows.size()));
  CHECK(general == inst.fleet * inst.graph.num_vertices());
}

TEST_CASE("family sets and tags") {
  CHECK(FamilySet::parse("all") == FamilySet::all());
  CHECK(FamilySet::parse("none") == FamilySet::none());
  CHECK(FamilySet::parse("") == FamilySet::none());
  const FamilySet s = FamilySet::parse("SUB,FCAV");
  CHECK(s.has(CutGroup::Subaisle));
  CHECK(s.has(CutGroup::Fcav));
  CHECK_FALSE(s.has(CutGroup::Avr));
  CHECK(s.str() == "FCAV,SUB");
  CHECK(FamilySet::parse(s.str()) == s);
  CHECK(FamilySet::all().str() == "all");
  CHECK(FamilySet::all().with(CutGroup::Aisle, false).str() == "DIR,FCAV,CA,SUB,AVR,PT");
  CHECK_THROWS_AS(FamilySet::parse("FCAV,BOGUS"), InvalidInput);
  for (CutGroup g : kAllCutGroups) CHECK(group_from_name(group_name(g)) == g);
  for (int f = 0; f < kFamilyCount; ++f) {
    CHECK(family_from_tag(family_tag(static_cast<Family>(f))) == static_cast<Family>(f));
  }
  CHECK_FALSE(family_from_tag("NOPE").has_value());
}
