#pragma once

#include <optional>
#include <vector>

#include "phasekd/params.hpp"

namespace phasekd {

/// Cosine-increasing EMA decay trajectory over K training steps:
///   tau(i) = 1 - (1 - tau0) * (cos(pi * i / K) + 1) / 2
/// so tau(0) = tau0 and tau(K) = 1, nondecreasing in between.
struct EmaSchedule {
  double tau0 = 0.9995;
  std::size_t total_steps = 1;

  double value(std::size_t step) const;
};

/// teacher <- tau * teacher + (1 - tau) * student, elementwise, with no
/// gradient tracking. Parameter sets must match in names, order, and shapes.
void ema_update(ParameterSet& teacher, const ParameterSet& student, double tau);

/// Immutable best-epoch snapshot used as the decoder's distillation source.
struct TeacherState {
  ParameterSet params;
  int source_epoch = 0;
  double selection_accuracy = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  double accuracy = 0.0;
  ParameterSet snapshot;
};

/// Snapshot of the completed epoch with the highest recorded accuracy, ties
/// broken toward the earlier epoch. Empty history means no teacher exists
/// yet and the caller disables the smoothing term.
std::optional<TeacherState> maybe_promote_teacher(const std::vector<EpochRecord>& history);

}  // namespace phasekd
