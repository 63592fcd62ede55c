#include "phasekd/ema.hpp"

#include <cmath>
#include <numbers>

namespace phasekd {

double EmaSchedule::value(std::size_t step) const {
  if (!(tau0 > 0.0 && tau0 < 1.0)) throw ParamError("ema tau0 must lie in (0, 1)");
  if (total_steps == 0) throw ParamError("ema schedule needs at least one step");
  if (step > total_steps) {
    throw ParamError("ema schedule step " + std::to_string(step) + " exceeds total " +
                     std::to_string(total_steps));
  }
  const double phase = std::numbers::pi * static_cast<double>(step) / static_cast<double>(total_steps);
  return 1.0 - 0.5 * (1.0 - tau0) * (std::cos(phase) + 1.0);
}

void ema_update(ParameterSet& teacher, const ParameterSet& student, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ParamError("ema tau must lie in [0, 1]");
  if (teacher.size() != student.size()) {
    throw StructuralError("ema_update: parameter counts differ");
  }
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    if (teacher.name(i) != student.name(i)) {
      throw StructuralError("ema_update: parameter name mismatch, " + teacher.name(i) + " vs " +
                            student.name(i));
    }
    Tensor& t = teacher.tensor(i);
    const Tensor& s = student.tensor(i);
    if (t.shape() != s.shape()) {
      throw StructuralError("ema_update: shape mismatch for " + teacher.name(i));
    }
    t.values() = tau * t.values() + (1.0 - tau) * s.values();
  }
}

std::optional<TeacherState> maybe_promote_teacher(const std::vector<EpochRecord>& history) {
  if (history.empty()) return std::nullopt;
  const EpochRecord* best = &history.front();
  for (const EpochRecord& rec : history) {
    if (rec.accuracy > best->accuracy) best = &rec;  // strict: ties keep the earlier epoch
  }
  return TeacherState{best->snapshot.deep_copy(), best->epoch, best->accuracy};
}

}  // namespace phasekd
