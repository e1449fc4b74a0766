#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "iterate.hpp"

namespace frfl {

struct SimulateConfig {
  double t_final = 1.0;
  /// Start time of the run; a restart passes the time of the snapshot it
  /// resumes from. Must be a multiple of dt.
  double t_start = 0.0;
  DirectStepConfig step;
  int record_stride = 1;
  /// 0 disables in-memory snapshots.
  int snapshot_stride = 0;
};

enum class RunStatus { completed, aborted };

struct Trajectory {
  explicit Trajectory(SolverState s) : final_state(std::move(s)) {}

  std::vector<DiagnosticRecord> records;
  std::vector<SolverState> snapshots;
  std::vector<long> snapshot_steps;
  SolverState final_state;
  long steps = 0;  // absolute step index of final_state
  RunStatus status = RunStatus::completed;
  std::string message;
  double suggested_dt = 0.0;  // set on CFL aborts
};

/// Called with (absolute step index, state) at every snapshot; lets callers
/// stream snapshots to disk instead of keeping them.
using SnapshotSink = std::function<void(long, const SolverState&)>;

/// Marches the direct stepper to t_final. Step failures end the run with
/// status `aborted` and the last good state in final_state.
inline Trajectory simulate(SolverState initial, const SimulateConfig& cfg, const SnapshotSink& sink = {}) {
  if (cfg.record_stride < 1) throw ConfigError("record_stride must be >= 1");
  if (cfg.snapshot_stride < 0) throw ConfigError("snapshot_stride must be >= 0");
  if (!(cfg.step.dt > 0.0)) throw ConfigError("dt must be positive");
  if (cfg.t_final < cfg.t_start) throw ConfigError("t_final must not precede t_start");
  const long first = iterate_detail::step_count(cfg.t_start, cfg.step.dt);
  const long last = iterate_detail::step_count(cfg.t_final, cfg.step.dt);
  const DyadicDecomposition dec(initial.grid());
  const DirectStepper stepper(initial.grid(), initial.params, cfg.step);

  initial.t = static_cast<double>(first) * cfg.step.dt;
  initial.sigma.canonicalize();
  initial.u.canonicalize();
  Trajectory tr(initial);
  tr.steps = first;
  auto emit = [&](long k, const SolverState& s) {
    if ((k - first) % cfg.record_stride == 0 || k == last) tr.records.push_back(diagnose(s, dec));
    if (cfg.snapshot_stride > 0 && ((k - first) % cfg.snapshot_stride == 0 || k == last)) {
      if (sink) {
        sink(k, s);
      } else {
        tr.snapshots.push_back(s);
        tr.snapshot_steps.push_back(k);
      }
    }
  };
  emit(first, tr.final_state);
  for (long k = first; k < last; ++k) {
    try {
      auto next = stepper.step(tr.final_state);
      next.t = static_cast<double>(k + 1) * cfg.step.dt;
      tr.final_state = std::move(next);
      tr.steps = k + 1;
    } catch (const CflViolation& e) {
      tr.status = RunStatus::aborted;
      tr.message = e.what();
      tr.suggested_dt = e.suggested_dt();
      break;
    } catch (const DomainError& e) {
      tr.status = RunStatus::aborted;
      tr.message = e.what();
      break;
    }
    emit(k + 1, tr.final_state);
  }
  if (tr.status == RunStatus::aborted && (tr.records.empty() || tr.records.back().t != tr.final_state.t))
    tr.records.push_back(diagnose(tr.final_state, dec));
  fill_residuals(tr.records);
  return tr;
}

}  // namespace frfl
