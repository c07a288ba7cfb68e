#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jobprp/model.hpp"

namespace jobprp {

struct BackendCapabilities {
  bool lazy_integral_callbacks = false;
  bool fractional_cut_callbacks = false;
  bool warm_start = false;
  bool time_limit = false;
  bool lp_relaxation = false;
  bool branching_priority = false;
};

enum class BackendStatus { Optimal, TimeLimit, Infeasible, Error };

struct BackendResult {
  BackendStatus status = BackendStatus::Error;
  bool has_solution = false;
  double objective = 0.0;
  double bound = 0.0;  // dual bound; equals objective for a solved LP
  std::vector<double> values;
  long long nodes = 0;
};

// Opaque solver options, passed through verbatim.
using BackendOptions = std::map<std::string, std::string>;

class MipBackend {
 public:
  virtual ~MipBackend() = default;
  virtual std::string name() const = 0;
  virtual BackendCapabilities capabilities() const = 0;
  // Loads columns, objective and all rows of `model`.
  virtual void load(const ModelSpec& model) = 0;
  virtual void add_rows(std::span<const ConstraintRow> rows) = 0;
  // Start vector for the next solve; ignored by the solver if infeasible.
  virtual void set_start(std::span<const double> values) = 0;
  virtual BackendResult solve(double time_limit_seconds) = 0;
  // Same rows with integrality dropped.
  virtual BackendResult solve_relaxation(double time_limit_seconds) = 0;
};

// Reads JOBPRP_BACKEND (only "highs" is built in); unknown names throw.
std::unique_ptr<MipBackend> make_backend(const BackendOptions& options = {});
std::string backend_version();

}  // namespace jobprp
