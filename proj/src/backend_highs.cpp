#include <cstdlib>
#include <string>

#include "Highs.h"
#include "jobprp/backend.hpp"
#include "jobprp/error.hpp"

namespace jobprp {

namespace {

void append_rows(std::span<const ConstraintRow> rows, std::vector<double>& lower,
                 std::vector<double>& upper, std::vector<HighsInt>& starts,
                 std::vector<HighsInt>& index, std::vector<double>& value) {
  for (const ConstraintRow& r : rows) {
    starts.push_back(static_cast<HighsInt>(index.size()));
    for (const Term& t : r.terms) {
      index.push_back(t.var);
      value.push_back(t.coef);
    }
    switch (r.sense) {
      case Sense::LessEqual:
        lower.push_back(-kHighsInf);
        upper.push_back(r.rhs);
        break;
      case Sense::GreaterEqual:
        lower.push_back(r.rhs);
        upper.push_back(kHighsInf);
        break;
      case Sense::Equal:
        lower.push_back(r.rhs);
        upper.push_back(r.rhs);
        break;
    }
  }
}

class HighsBackend final : public MipBackend {
 public:
  explicit HighsBackend(const BackendOptions& options) {
    set("output_flag", "false");
    set("threads", "1");
    set("random_seed", "0");
    set("mip_rel_gap", "0");
    // Objective coefficients are integral decimetres.
    set("mip_abs_gap", "0.99");
    for (const auto& [key, value] : options) set(key, value);
  }

  std::string name() const override { return "highs"; }

  BackendCapabilities capabilities() const override {
    BackendCapabilities c;
    c.warm_start = true;
    c.time_limit = true;
    c.lp_relaxation = true;
    return c;
  }

  void load(const ModelSpec& model) override {
    HighsLp lp;
    const auto n = static_cast<HighsInt>(model.vars.size());
    lp.num_col_ = n;
    lp.sense_ = ObjSense::kMinimize;
    lp.integrality_.reserve(model.vars.size());
    for (const Variable& v : model.vars) {
      lp.col_cost_.push_back(v.cost);
      lp.col_lower_.push_back(v.lower);
      lp.col_upper_.push_back(v.upper);
      lp.integrality_.push_back(v.type == VarType::Continuous ? HighsVarType::kContinuous
                                                              : HighsVarType::kInteger);
    }
    std::vector<HighsInt> starts;
    append_rows(model.rows, lp.row_lower_, lp.row_upper_, starts, lp.a_matrix_.index_,
                lp.a_matrix_.value_);
    starts.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
    lp.num_row_ = static_cast<HighsInt>(model.rows.size());
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = lp.num_col_;
    lp.a_matrix_.num_row_ = lp.num_row_;
    lp.a_matrix_.start_ = std::move(starts);
    if (highs_.passModel(std::move(lp)) == HighsStatus::kError) {
      throw BackendError("HiGHS rejected the model");
    }
    num_cols_ = n;
  }

  void add_rows(std::span<const ConstraintRow> rows) override {
    if (rows.empty()) return;
    std::vector<double> lower, upper, value;
    std::vector<HighsInt> starts, index;
    append_rows(rows, lower, upper, starts, index, value);
    if (highs_.addRows(static_cast<HighsInt>(rows.size()), lower.data(), upper.data(),
                       static_cast<HighsInt>(index.size()), starts.data(), index.data(),
                       value.data()) == HighsStatus::kError) {
      throw BackendError("HiGHS rejected added rows");
    }
  }

  void set_start(std::span<const double> values) override {
    if (static_cast<HighsInt>(values.size()) != num_cols_) {
      throw BackendError("start vector has the wrong length");
    }
    HighsSolution sol;
    sol.col_value.assign(values.begin(), values.end());
    sol.value_valid = true;
    if (highs_.setSolution(sol) == HighsStatus::kError) {
      throw BackendError("HiGHS rejected the start vector");
    }
  }

  BackendResult solve(double time_limit_seconds) override {
    set("solve_relaxation", "false");
    return run(time_limit_seconds, true);
  }

  BackendResult solve_relaxation(double time_limit_seconds) override {
    set("solve_relaxation", "true");
    BackendResult r = run(time_limit_seconds, false);
    set("solve_relaxation", "false");
    return r;
  }

 private:
  void set(const std::string& key, const std::string& value) {
    if (highs_.setOptionValue(key, value) != HighsStatus::kOk) {
      throw BackendError("invalid HiGHS option " + key + "=" + value);
    }
  }

  BackendResult run(double time_limit_seconds, bool mip) {
    set("time_limit", time_limit_seconds > 0 ? std::to_string(time_limit_seconds) : "inf");
    BackendResult r;
    if (highs_.run() == HighsStatus::kError) {
      r.status = BackendStatus::Error;
      return r;
    }
    const HighsInfo& info = highs_.getInfo();
    switch (highs_.getModelStatus()) {
      case HighsModelStatus::kOptimal:
        r.status = BackendStatus::Optimal;
        break;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kSolutionLimit:
      case HighsModelStatus::kInterrupt:
        r.status = BackendStatus::TimeLimit;
        break;
      case HighsModelStatus::kInfeasible:
      case HighsModelStatus::kUnboundedOrInfeasible:
        r.status = BackendStatus::Infeasible;
        break;
      default:
        r.status = BackendStatus::Error;
        break;
    }
    r.has_solution = info.primal_solution_status == kSolutionStatusFeasible;
    if (r.has_solution) {
      r.objective = info.objective_function_value;
      r.values = highs_.getSolution().col_value;
    }
    if (mip) {
      r.bound = info.mip_dual_bound;
      r.nodes = info.mip_node_count;
    } else {
      r.bound = r.status == BackendStatus::Optimal ? r.objective : -kHighsInf;
    }
    return r;
  }

  Highs highs_;
  HighsInt num_cols_ = 0;
};

}  // namespace

std::string backend_version() {
  return "highs " + std::to_string(HIGHS_VERSION_MAJOR) + "." + std::to_string(HIGHS_VERSION_MINOR) +
         "." + std::to_string(HIGHS_VERSION_PATCH);
}

std::unique_ptr<MipBackend> make_backend(const BackendOptions& options) {
  const char* env = std::getenv("JOBPRP_BACKEND");
  const std::string which = env && *env ? env : "highs";
  if (which == "highs") return std::make_unique<HighsBackend>(options);
  throw BackendError("unknown backend '" + which + "'");
}

}  // namespace jobprp
