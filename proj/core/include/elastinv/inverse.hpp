#pragma once

#include <functional>
#include <string>
#include <vector>

#include "elastinv/derivative.hpp"
#include "elastinv/forward.hpp"
#include "elastinv/geometry.hpp"

namespace elastinv {

/// Sphere of radius R0 in the surface coefficient encoding (order >= 1).
SurfaceParam initial_guess(double R0, int N);

struct InversionConfig {
  std::vector<double> omegas;     ///< strictly increasing; empty = every frequency in the data
  int iterations = 100;           ///< L per stage
  double tau0 = 0.005;            ///< tau_i = tau0 / max(k_i, 1)
  double R0 = 0.5;                ///< initial sphere
  int order_offset = 0;           ///< surface order k_i = floor(omega_i) + offset
  bool backtracking = false;      ///< also halve tau until f decreases
  bool sweep_directions = false;  ///< L iterations per incident wave instead of one joint sum
  int max_halvings = 8;           ///< step retries before a stage aborts
  /// Modal order of the forward solves at omega; empty = default_truncation.
  std::function<int(const Medium&, double R)> forward_order;
  SolverOptions solver;
  /// Called after each accepted step; not part of the result.
  std::function<void(int stage, int iter, double f)> progress;
};

/// Forward order rule used by the inversion tools: ceil(ks R + 2 (ks R)^{1/3} + 4).
int inversion_forward_order(const Medium& med, double R);

struct IterationRecord {
  int stage = 0;
  int iteration = 0;
  double omega = 0.0;
  double f = 0.0;
  double step = 0.0;
  double residual = 0.0;
  double gradient_norm = 0.0;
};

struct StageSnapshot {
  double omega = 0.0;
  int order = 0;
  double step = 0.0;
  double f_start = 0.0;
  double f_end = 0.0;
  SurfaceParam C;
};

struct InversionState {
  SurfaceParam C;
  std::vector<IterationRecord> history;
  std::vector<StageSnapshot> stages;
  bool aborted = false;
  std::string abort_reason;
};

struct StageSpec {
  int index = 0;
  double omega = 0.0;
  int order = 0;
  double step = 0.0;
  int iterations = 0;
};

/// Frequency schedule built from the config (or the data when omegas is empty).
std::vector<StageSpec> build_schedule(const InversionConfig& cfg,
                                      const std::vector<MeasurementSet>& data);

/// Runs one continuation stage in place: pads C to the stage order and takes
/// fixed-size gradient steps. A trial point whose forward solve fails counts as
/// f = +inf; tau is halved and the step retried, and after max_halvings the
/// state is marked aborted.
void descent_stage(InversionState& state, const StageSpec& stage,
                   const std::vector<MeasurementSet>& data, const InversionConfig& cfg);

InversionState continuation_run(const std::vector<MeasurementSet>& data,
                                const InversionConfig& cfg);

/// Relative L2 error of the radial distance along rays from the origin,
/// normalised by the truth.
double surface_error(const SurfaceParam& reconstruction, const SurfaceParam& truth,
                     int order = 24);

}  // namespace elastinv
