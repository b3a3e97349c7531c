#include "elastinv/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "elastinv/errors.hpp"

namespace elastinv {

SurfaceParam initial_guess(double R0, int N) {
  if (!(R0 > 0.0)) throw ValidationError("initial_guess: R0 must be positive");
  return sphere_param(R0, std::max(N, 1));
}

int inversion_forward_order(const Medium& med, double R) {
  const double k = med.kappa_s() * R;
  return static_cast<int>(std::ceil(k + 2.0 * std::cbrt(k) + 4.0));
}

std::vector<StageSpec> build_schedule(const InversionConfig& cfg,
                                      const std::vector<MeasurementSet>& data) {
  std::vector<double> omegas = cfg.omegas;
  if (omegas.empty()) {
    std::set<double> seen;
    for (const auto& ms : data) seen.insert(ms.medium.omega);
    omegas.assign(seen.begin(), seen.end());
  }
  if (omegas.empty()) throw ValidationError("build_schedule: no frequencies");
  if (cfg.iterations < 0) throw ValidationError("build_schedule: negative iteration count");
  std::vector<StageSpec> out;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0)) throw ValidationError("build_schedule: frequencies must be positive");
    if (i > 0 && !(omegas[i] > omegas[i - 1])) {
      throw ValidationError("build_schedule: frequencies must be strictly increasing");
    }
    StageSpec s;
    s.index = static_cast<int>(i);
    s.omega = omegas[i];
    const int k = static_cast<int>(std::floor(omegas[i]));
    s.order = std::max(1, k + cfg.order_offset);
    s.step = cfg.tau0 / std::max(k, 1);
    s.iterations = cfg.iterations;
    out.push_back(s);
  }
  return out;
}

namespace {

struct Evaluation {
  bool ok = false;
  ObjectiveResult r;
  std::string error;
};

Evaluation evaluate(const SurfaceParam& C, const std::vector<MeasurementSet>& data,
                    const SolverOptions& opt) {
  Evaluation e;
  try {
    e.r = objective_and_gradient(C, data, opt, true);
    e.ok = std::isfinite(e.r.f) && e.r.gradient.allFinite();
    if (!e.ok) e.error = "non-finite objective";
  } catch (const Error& ex) {
    e.error = ex.what();
  }
  return e;
}

// Plain descent on one data subset; returns false when the stage must abort.
bool run_descent(InversionState& state, const StageSpec& stage,
                 const std::vector<MeasurementSet>& data, const InversionConfig& cfg,
                 const SolverOptions& opt, int iterations) {
  Evaluation cur = evaluate(state.C, data, opt);
  if (!cur.ok) {
    state.aborted = true;
    state.abort_reason = "objective failed at the stage start: " + cur.error;
    return false;
  }
  for (int l = 0; l < iterations; ++l) {
    double tau = stage.step;
    Evaluation next;
    SurfaceParam trial;
    int halvings = 0;
    for (;;) {
      trial = state.C;
      for (std::size_t i = 0; i < trial.C.size(); ++i) trial.C[i] -= tau * cur.r.gradient(i);
      next = evaluate(trial, data, opt);
      const bool accept = next.ok && (!cfg.backtracking || next.r.f < cur.r.f);
      if (accept) break;
      if (++halvings > cfg.max_halvings) {
        state.aborted = true;
        state.abort_reason = "step rejected " + std::to_string(halvings) +
                             " times at stage " + std::to_string(stage.index) +
                             ", iteration " + std::to_string(l) +
                             (next.ok ? std::string(": no decrease") : ": " + next.error);
        return false;
      }
      tau *= 0.5;
    }
    IterationRecord rec;
    rec.stage = stage.index;
    rec.iteration = static_cast<int>(state.history.size());
    rec.omega = stage.omega;
    rec.f = cur.r.f;
    rec.step = tau;
    rec.residual = cur.r.max_residual;
    rec.gradient_norm = cur.r.gradient.norm();
    state.history.push_back(rec);
    state.C = std::move(trial);
    cur = std::move(next);
    if (cfg.progress) cfg.progress(stage.index, l, cur.r.f);
  }
  IterationRecord last;
  last.stage = stage.index;
  last.iteration = static_cast<int>(state.history.size());
  last.omega = stage.omega;
  last.f = cur.r.f;
  last.step = 0.0;
  last.residual = cur.r.max_residual;
  last.gradient_norm = cur.r.gradient.norm();
  state.history.push_back(last);
  return true;
}

}  // namespace

void descent_stage(InversionState& state, const StageSpec& stage,
                   const std::vector<MeasurementSet>& data, const InversionConfig& cfg) {
  std::vector<MeasurementSet> subset;
  for (const auto& ms : data) {
    if (std::abs(ms.medium.omega - stage.omega) <= 1e-12 * stage.omega) subset.push_back(ms);
  }
  if (subset.empty()) {
    throw ValidationError("descent_stage: no data at omega = " + std::to_string(stage.omega));
  }
  if (state.C.N < stage.order) state.C = state.C.padded(stage.order);

  SolverOptions opt = cfg.solver;
  if (opt.order < 0 && cfg.forward_order) {
    opt.order = cfg.forward_order(subset.front().medium, subset.front().R);
  }

  StageSnapshot snap;
  snap.omega = stage.omega;
  snap.order = state.C.N;
  snap.step = stage.step;
  const std::size_t first = state.history.size();

  if (cfg.sweep_directions) {
    for (const auto& ms : subset) {
      if (!run_descent(state, stage, {ms}, cfg, opt, stage.iterations)) break;
    }
  } else {
    run_descent(state, stage, subset, cfg, opt, stage.iterations);
  }
  snap.f_start = state.history.size() > first ? state.history[first].f
                                              : std::numeric_limits<double>::quiet_NaN();
  snap.f_end = state.history.empty() ? snap.f_start : state.history.back().f;
  snap.C = state.C;
  state.stages.push_back(std::move(snap));
}

InversionState continuation_run(const std::vector<MeasurementSet>& data,
                                const InversionConfig& cfg) {
  if (data.empty()) throw ValidationError("continuation_run: no data");
  for (const auto& ms : data) ms.validate();
  const auto schedule = build_schedule(cfg, data);
  InversionState state;
  state.C = initial_guess(cfg.R0, schedule.front().order);
  for (const auto& stage : schedule) {
    descent_stage(state, stage, data, cfg);
    if (state.aborted) break;
  }
  return state;
}

double surface_error(const SurfaceParam& reconstruction, const SurfaceParam& truth, int order) {
  const Surface rec(reconstruction), tru(truth);
  const SphereQuadrature quad(order);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const Vec3 dir = to_cartesian({1.0, quad.theta(k), quad.phi(k)});
    const double rr = ray_radius(rec, dir);
    const double rt = ray_radius(tru, dir);
    num += quad.weight(k) * (rr - rt) * (rr - rt);
    den += quad.weight(k) * rt * rt;
  }
  return std::sqrt(num / den);
}

}  // namespace elastinv
