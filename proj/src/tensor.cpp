#include "phasekd/tensor.hpp"

#include <sstream>
#include <utility>

namespace phasekd {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

namespace {

std::shared_ptr<TensorData> make_data(Shape shape) {
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_to_string(shape));
  }
  auto data = std::make_shared<TensorData>();
  data->values = ArrayX::Zero(static_cast<Eigen::Index>(shape_size(shape)));
  data->shape = std::move(shape);
  return data;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto data = make_data(std::move(shape));
  data->requires_grad = requires_grad;
  return Tensor(std::move(data));
}

Tensor Tensor::constant(Shape shape, double value) {
  auto data = make_data(std::move(shape));
  data->values.setConstant(value);
  return Tensor(std::move(data));
}

Tensor Tensor::scalar(double value) { return constant(Shape{}, value); }

Tensor Tensor::from_values(Shape shape, std::vector<double> values) {
  if (values.size() != shape_size(shape)) {
    throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                     shape_to_string(shape));
  }
  auto data = make_data(std::move(shape));
  for (std::size_t i = 0; i < values.size(); ++i) data->values(static_cast<Eigen::Index>(i)) = values[i];
  return Tensor(std::move(data));
}

Tensor Tensor::from_array(Shape shape, ArrayX values) {
  if (static_cast<std::size_t>(values.size()) != shape_size(shape)) {
    throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                     shape_to_string(shape));
  }
  auto data = make_data(std::move(shape));
  data->values = std::move(values);
  return Tensor(std::move(data));
}

const ArrayX& Tensor::grad() const {
  if (!has_grad()) throw StructuralError("tensor has no gradient buffer");
  return data_->grad;
}

ArrayX& Tensor::ensure_grad() {
  if (!has_grad()) data_->grad = ArrayX::Zero(data_->values.size());
  return data_->grad;
}

Tensor Tensor::detach() const {
  auto data = std::make_shared<TensorData>();
  data->shape = data_->shape;
  data->values = data_->values;
  data->requires_grad = false;
  return Tensor(std::move(data));
}

Tensor Tensor::clone() const {
  auto data = std::make_shared<TensorData>();
  data->shape = data_->shape;
  data->values = data_->values;
  data->requires_grad = data_->requires_grad;
  return Tensor(std::move(data));
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() requires a single-element tensor, got " + shape_to_string(shape()));
  return data_->values(0);
}

double Tensor::at(std::size_t r, std::size_t c) const {
  if (rank() != 2) throw ShapeError("at(r, c) requires a rank-2 tensor, got " + shape_to_string(shape()));
  return data_->values(static_cast<Eigen::Index>(r * dim(1) + c));
}

Tape& Tape::active() {
  thread_local Tape tape;
  return tape;
}

void Tape::record(std::function<void()> backward_step) {
  steps_.push_back(std::move(backward_step));
}

void Tape::replay_backward() {
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
  steps_.clear();
}

NoGradGuard::NoGradGuard() {
  Tape& tape = Tape::active();
  previous_ = tape.recording_;
  tape.recording_ = false;
}

NoGradGuard::~NoGradGuard() { Tape::active().recording_ = previous_; }

void backward(const Tensor& root) {
  if (!root.defined() || root.size() != 1) {
    throw ShapeError("backward() requires a single-element root tensor");
  }
  root.data()->grad = ArrayX::Ones(1);
  Tape::active().replay_backward();
}

bool should_record(std::initializer_list<const Tensor*> inputs) {
  if (!Tape::active().recording()) return false;
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

void accumulate_grad(TensorData& t, const ArrayX& g) {
  if (t.grad.size() == 0) t.grad = ArrayX::Zero(t.values.size());
  t.grad += g;
}

}  // namespace phasekd
