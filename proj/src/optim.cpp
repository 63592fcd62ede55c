#include "phasekd/optim.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "phasekd/io_binary.hpp"

namespace phasekd {

OptimizerKind optimizer_from_name(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ParamError("unknown optimizer: " + name);
}

const char* optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

void validate(const OptimizerConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ParamError("learning rate must be positive");
  if (cfg.weight_decay < 0.0) throw ParamError("weight decay must be nonnegative");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) throw ParamError("momentum must lie in [0, 1)");
}

Optimizer::Optimizer(const OptimizerConfig& cfg) : cfg_(cfg) { validate(cfg); }

void Optimizer::step(ParameterSet& params) {
  ++step_count_;
  if (first_moment_.empty()) {
    first_moment_.resize(params.size());
    second_moment_.resize(params.size());
  }

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params.trainable(i)) continue;
    Tensor& p = params.tensor(i);
    if (!p.has_grad()) {
      throw StructuralError("optimizer step: parameter " + params.name(i) + " has no gradient");
    }
    ArrayX g = p.grad();
    if (cfg_.weight_decay != 0.0) g += cfg_.weight_decay * p.values();

    if (cfg_.kind == OptimizerKind::kSgd) {
      if (cfg_.momentum != 0.0) {
        ArrayX& buf = first_moment_[i];
        if (buf.size() == 0) buf = ArrayX::Zero(g.size());
        buf = cfg_.momentum * buf + g;
        p.values() -= cfg_.learning_rate * buf;
      } else {
        p.values() -= cfg_.learning_rate * g;
      }
    } else {
      ArrayX& m = first_moment_[i];
      ArrayX& v = second_moment_[i];
      if (m.size() == 0) {
        m = ArrayX::Zero(g.size());
        v = ArrayX::Zero(g.size());
      }
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.square();
      const double bias1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
      const double bias2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
      ArrayX m_hat = m / bias1;
      ArrayX v_hat = v / bias2;
      p.values() -= cfg_.learning_rate * m_hat / (v_hat.sqrt() + cfg_.epsilon);
    }
  }
}

void Optimizer::zero_grads(ParameterSet& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.trainable(i)) {
      params.tensor(i).ensure_grad().setZero();
    } else {
      params.tensor(i).clear_grad();
    }
  }
}

void Optimizer::save_state(std::ostream& os) const {
  write_u64(os, static_cast<std::uint64_t>(step_count_));
  write_u64(os, first_moment_.size());
  auto dump = [&os](const std::vector<ArrayX>& buffers) {
    for (const ArrayX& b : buffers) {
      write_u64(os, static_cast<std::uint64_t>(b.size()));
      for (Eigen::Index i = 0; i < b.size(); ++i) write_f64(os, b(i));
    }
  };
  dump(first_moment_);
  dump(second_moment_);
}

void Optimizer::load_state(std::istream& is) {
  step_count_ = static_cast<long>(read_u64(is, "step count"));
  const std::uint64_t count = read_u64(is, "buffer count");
  auto slurp = [&is](std::vector<ArrayX>& buffers, std::uint64_t n) {
    buffers.assign(n, ArrayX());
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t size = read_u64(is, "buffer size");
      buffers[i] = ArrayX::Zero(static_cast<Eigen::Index>(size));
      for (std::uint64_t j = 0; j < size; ++j) buffers[i](static_cast<Eigen::Index>(j)) = read_f64(is, "moment");
    }
  };
  slurp(first_moment_, count);
  slurp(second_moment_, count);
}

}  // namespace phasekd
