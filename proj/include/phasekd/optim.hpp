#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "phasekd/params.hpp"

namespace phasekd {

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind optimizer_from_name(const std::string& name);
const char* optimizer_name(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double learning_rate = 1e-2;
  double weight_decay = 1e-5;
  double momentum = 0.0;  // SGD only
  double beta1 = 0.9;     // Adam
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

void validate(const OptimizerConfig& cfg);

/// SGD (optional momentum) and Adam with classic L2-coupled weight decay:
/// the decay term wd * p is added to the gradient before the update rule.
class Optimizer {
 public:
  explicit Optimizer(const OptimizerConfig& cfg);

  /// Applies one update to every trainable parameter. Each must carry a
  /// gradient buffer (zero_grads allocates them).
  void step(ParameterSet& params);

  /// Clears gradients: trainable parameters get zeroed buffers, others lose
  /// theirs. Idempotent.
  static void zero_grads(ParameterSet& params);

  const OptimizerConfig& config() const { return cfg_; }
  long step_count() const { return step_count_; }

  // Bitwise state round-trip (moment buffers and step counter).
  void save_state(std::ostream& os) const;
  void load_state(std::istream& is);

 private:
  OptimizerConfig cfg_;
  long step_count_ = 0;
  std::vector<ArrayX> first_moment_;   // Adam m / SGD momentum buffer
  std::vector<ArrayX> second_moment_;  // Adam v
};

}  // namespace phasekd
