#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jobprp/graph.hpp"
#include "jobprp/instance.hpp"

namespace jobprp {

enum class Family {
  BaseCapacity,
  BaseAssign,
  BaseTouch,
  BaseFlow,
  BaseSource,
  BaseLink,
  BaseDegree,
  SymOrder,
  SymForce,
  SymDir,
  Fcav,
  CaBelow,
  CaAbove,
  Aisle,
  Sub,
  Avr,
  Pt,
  Nr,
  Connectivity,
};
inline constexpr int kFamilyCount = 19;

std::string family_tag(Family f);
std::optional<Family> family_from_tag(const std::string& tag);

// Layout-based inequality groups that can be switched on and off.
enum class CutGroup { Direction, Fcav, CrossAisle, Aisle, Subaisle, Avr, PassThrough };
inline constexpr std::array<CutGroup, 7> kAllCutGroups = {
    CutGroup::Direction, CutGroup::Fcav,     CutGroup::CrossAisle, CutGroup::Aisle,
    CutGroup::Subaisle,  CutGroup::Avr,      CutGroup::PassThrough};

std::string group_name(CutGroup g);  // "DIR", "FCAV", "CA", "A", "SUB", "AVR", "PT"
std::optional<CutGroup> group_from_name(const std::string& name);

struct FamilySet {
  std::array<bool, 7> enabled{};

  static FamilySet all();
  static FamilySet none();
  bool has(CutGroup g) const { return enabled[static_cast<std::size_t>(g)]; }
  FamilySet with(CutGroup g, bool on) const;
  // Comma-separated group names, or "all" / "none".
  static FamilySet parse(const std::string& text);
  std::string str() const;
  friend bool operator==(const FamilySet&, const FamilySet&) = default;
};

enum class VarType { Continuous, Binary, Integer };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
  std::string name;
  VarType type = VarType::Continuous;
  double lower = 0.0;
  double upper = 1.0;
  double cost = 0.0;  // decimetres per unit
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct ConstraintRow {
  Family family = Family::BaseFlow;
  std::vector<Term> terms;
  Sense sense = Sense::GreaterEqual;
  double rhs = 0.0;
};

// Variable indices, -1 where a variable does not exist.
struct VariableCatalog {
  int trolleys = 0;
  std::vector<std::vector<int>> x;      // [t][arc]
  std::vector<std::vector<int>> z;      // [order][t]
  std::vector<int> alpha;               // [t]
  std::vector<std::vector<int>> y;      // [t][vertex]
  std::vector<std::vector<int>> g;      // [t][vertex]
  std::vector<std::vector<int>> m_north;  // [t][vertex], location vertices with SUB only
  std::vector<std::vector<int>> m_south;
};

// Order sets indexed by the layout. Vectors hold order indices ascending.
struct OrderGeometry {
  std::vector<std::vector<int>> phi;    // [a], a = 1..W_A (index 0 unused)
  std::vector<std::vector<int>> gamma;  // [c], c = 1..W_C (index 0 unused)
  std::vector<std::vector<int>> theta;  // [a], a = 2..W_A
  std::vector<std::vector<int>> omega;  // [vertex]
  std::vector<std::vector<int>> psi;    // [vertex]
};

OrderGeometry compute_geometry(const Instance& inst);

struct ModelOptions {
  FamilySet families = FamilySet::all();
  bool symmetry = true;
  bool no_reversal = false;  // the instance graph has one vertex per subaisle
};

struct ModelSpec {
  std::vector<Variable> vars;
  std::vector<ConstraintRow> rows;
  VariableCatalog cat;
  ModelOptions options;
  int forced_trolleys = 0;

  int add_var(Variable v);
  void add_row(ConstraintRow r) { rows.push_back(std::move(r)); }
  std::map<Family, int> row_counts() const;
};

// Objective, capacity, assignment, touch, flow, source, link and degree rows.
ModelSpec build_base_model(const Instance& inst);
void add_symmetry(ModelSpec& m, const Instance& inst);
void add_direction(ModelSpec& m, const Instance& inst);
void add_fcav(ModelSpec& m, const Instance& inst, const OrderGeometry& geo);
void add_cross_aisle(ModelSpec& m, const Instance& inst, const OrderGeometry& geo);
void add_aisle(ModelSpec& m, const Instance& inst, const OrderGeometry& geo);
void add_subaisle(ModelSpec& m, const Instance& inst, const OrderGeometry& geo);
// Without subaisle ends only artificial-artificial reversals are cut; turning
// at the end of a subaisle is the only turn left in the no-reversal case.
void add_avr(ModelSpec& m, const Instance& inst, bool subaisle_ends = true);
void add_pass_through(ModelSpec& m, const Instance& inst, const OrderGeometry& geo);
void add_no_reversal_pairs(ModelSpec& m, const Instance& inst);

// Base model plus symmetry and every enabled family.
ModelSpec build_model(const Instance& inst, const ModelOptions& options = {});

// sum_{j in W} g_tj - sum_{A(W)} x_tjk - y_ti >= 0.
ConstraintRow connectivity_row(const VariableCatalog& cat, const PickingGraph& g, int t,
                               std::span<const int> members, int representative);

// Instance whose every non-empty subaisle is one midpoint vertex, split so the
// two half-lengths add up to the original subaisle length.
struct CollapsedInstance {
  Instance instance;
  // Midpoint vertex id -> original subaisle chain, north to south, including
  // both artificial end vertices (ids of the original graph).
  std::map<int, std::vector<int>> chain;
};
CollapsedInstance collapse_subaisles(const Instance& inst);
// Replaces each pass through a midpoint vertex by a full subaisle traversal.
Walk expand_collapsed_walk(const CollapsedInstance& ci, const Instance& original, const Walk& walk);

struct NoReversalModel {
  CollapsedInstance collapsed;
  ModelSpec model;
};
NoReversalModel apply_no_reversal(const Instance& inst, ModelOptions options = {});

// Trolley batches and closed walks on inst.graph. Trolley t is index t.
struct Plan {
  std::vector<std::vector<int>> batches;  // order indices per trolley
  std::vector<Walk> walks;                // empty walk for an idle trolley
};

// Variable vector realising `plan`. M variables are set to path minima.
std::vector<double> encode_plan(const ModelSpec& m, const Instance& inst, const Plan& plan);

// Canonical representative of a plan: walks oriented so the first arc out of
// the origin is no further east than the last arc back, trolleys ordered by
// their smallest order index, idle trolleys last.
Plan canonical_plan(const Instance& inst, Plan plan);

struct RowViolation {
  int row = 0;
  Family family = Family::BaseFlow;
  double amount = 0.0;
};
double row_activity(const ConstraintRow& r, std::span<const double> values);
double row_violation(const ConstraintRow& r, std::span<const double> values);
std::vector<RowViolation> replay(const ModelSpec& m, std::span<const double> values,
                                 double tol = 1e-9);

void write_lp(std::ostream& os, const ModelSpec& m);

}  // namespace jobprp
