#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "phasekd/errors.hpp"

namespace phasekd {

using ArrayX = Eigen::ArrayXd;
using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

struct TensorData {
  Shape shape;
  ArrayX values;  // flat, row-major
  ArrayX grad;    // empty until a backward pass (or zero_grads) allocates it
  bool requires_grad = false;
};

/// Dense tensor handle with shared storage. Copying a Tensor aliases the
/// same buffer; detach() and clone() make independent storage. All math on
/// tensors goes through the free functions in ops.hpp, which record their
/// backward rules on the active tape.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorData> data) : data_(std::move(data)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor constant(Shape shape, double value);
  static Tensor scalar(double value);
  static Tensor from_values(Shape shape, std::vector<double> values);
  static Tensor from_array(Shape shape, ArrayX values);

  bool defined() const { return static_cast<bool>(data_); }
  const Shape& shape() const { return data_->shape; }
  std::size_t rank() const { return data_->shape.size(); }
  std::size_t dim(std::size_t i) const { return data_->shape.at(i); }
  std::size_t size() const { return static_cast<std::size_t>(data_->values.size()); }

  ArrayX& values() { return data_->values; }
  const ArrayX& values() const { return data_->values; }

  bool requires_grad() const { return data_->requires_grad; }
  void set_requires_grad(bool flag) { data_->requires_grad = flag; }

  bool has_grad() const { return data_->grad.size() > 0; }
  const ArrayX& grad() const;
  /// Allocates a zero gradient buffer if absent, then returns it.
  ArrayX& ensure_grad();
  void clear_grad() { data_->grad.resize(0); }

  /// Independent copy of the values with gradient tracking off.
  Tensor detach() const;
  /// Independent copy of values and requires_grad flag (no grad copied).
  Tensor clone() const;

  /// Value of a single-element tensor.
  double item() const;
  double at(std::size_t i) const { return data_->values(static_cast<Eigen::Index>(i)); }
  double at(std::size_t r, std::size_t c) const;

  const std::shared_ptr<TensorData>& data() const { return data_; }

 private:
  std::shared_ptr<TensorData> data_;
};

/// Thread-local record of executed operations. Each entry is the backward
/// rule of one op, holding references to its input and output storage.
/// Replaying the tape in reverse order implements reverse-mode
/// differentiation. Tensors whose inputs are all detached never enter the
/// tape, so no gradient can flow into them.
class Tape {
 public:
  static Tape& active();

  bool recording() const { return recording_; }
  void record(std::function<void()> backward_step);
  std::size_t size() const { return steps_.size(); }
  void clear() { steps_.clear(); }

  /// Runs the recorded backward rules in reverse execution order, then
  /// clears the tape.
  void replay_backward();

 private:
  friend struct NoGradGuard;
  std::vector<std::function<void()>> steps_;
  bool recording_ = true;
};

/// RAII scope that suspends tape recording (evaluation-mode forwards).
struct NoGradGuard {
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Seeds d(root)/d(root) = 1 and replays the active tape backward,
/// accumulating gradients into every tensor that requires them. The root
/// must be a single-element tensor. Consumes (clears) the tape.
void backward(const Tensor& root);

/// True when the active tape is recording and any input requires grad.
bool should_record(std::initializer_list<const Tensor*> inputs);

/// grad(t) += g, allocating the buffer on first use.
void accumulate_grad(TensorData& t, const ArrayX& g);

}  // namespace phasekd
