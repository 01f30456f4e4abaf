#pragma once

#include "rotatm/atmosphere.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rotatm {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool checks_pass = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string detail;

  bool pass() const { return checks_pass && seconds <= time_limit; }
  /// "PASS  3  physical vacuum  (0.02 s / 1 s)  detail"
  std::string line() const;
};

struct AcceptanceConfig {
  PhysicalParams params = PhysicalParams::reference();
  /// mesh cells (s, zeta) per azimuthal order; N is about 175 for these sizes
  int cells_s = 8;
  int cells_zeta_m0 = 12;
  int cells_zeta_m = 16;
  unsigned seed = 20240611u;
};

using CriterionFn = std::function<CriterionResult(const AcceptanceConfig&)>;

/// Criteria 1..12 in order.
const std::vector<CriterionFn>& acceptance_criteria();
CriterionResult run_criterion(int id, const AcceptanceConfig& cfg = {});
/// Runs all criteria; the callback (if any) sees each result as it finishes.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceConfig& cfg = {},
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace rotatm
