#include "phasekd/ops.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace phasekd {

namespace {

using Eigen::Index;
using MapM = Eigen::Map<MatrixRM>;
using MapCM = Eigen::Map<const MatrixRM>;

void ensure_grad_buffer(TensorData& t) {
  if (t.grad.size() == 0) t.grad = ArrayX::Zero(t.values.size());
}

void check_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + " requires a rank-2 tensor, got " + shape_to_string(t.shape()));
  }
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " + shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()) + " do not match");
  }
}

std::size_t last_dim(const Tensor& t, const char* op) {
  if (t.rank() == 0) {
    throw ShapeError(std::string(op) + " requires rank >= 1, got a scalar");
  }
  return t.dim(t.rank() - 1);
}

// Records the backward rule of a unary elementwise op. `dlocal` maps the
// stored input/output to the elementwise local derivative.
template <typename DLocal>
Tensor record_unary(const Tensor& x, ArrayX out_values, DLocal dlocal) {
  Tensor out = Tensor::from_array(x.shape(), std::move(out_values));
  if (should_record({&x})) {
    out.set_requires_grad(true);
    auto xd = x.data();
    auto od = out.data();
    Tape::active().record([xd, od, dlocal]() {
      if (od->grad.size() == 0 || !xd->requires_grad) return;
      accumulate_grad(*xd, ArrayX(od->grad * dlocal(*xd, *od)));
    });
  }
  return out;
}

template <typename DA, typename DB>
Tensor record_binary(const Tensor& a, const Tensor& b, ArrayX out_values, DA da, DB db) {
  Tensor out = Tensor::from_array(a.shape(), std::move(out_values));
  if (should_record({&a, &b})) {
    out.set_requires_grad(true);
    auto ad = a.data();
    auto bd = b.data();
    auto od = out.data();
    Tape::active().record([ad, bd, od, da, db]() {
      if (od->grad.size() == 0) return;
      if (ad->requires_grad) accumulate_grad(*ad, ArrayX(od->grad * da(*ad, *bd)));
      if (bd->requires_grad) accumulate_grad(*bd, ArrayX(od->grad * db(*ad, *bd)));
    });
  }
  return out;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_rank2(a, "matmul");
  check_rank2(b, "matmul");
  if (a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: inner dimensions disagree, " + shape_to_string(a.shape()) + " * " +
                     shape_to_string(b.shape()));
  }
  const Index m = static_cast<Index>(a.dim(0));
  const Index k = static_cast<Index>(a.dim(1));
  const Index n = static_cast<Index>(b.dim(1));

  Tensor out = Tensor::zeros({a.dim(0), b.dim(1)});
  MapCM A(a.values().data(), m, k);
  MapCM B(b.values().data(), k, n);
  MapM O(out.values().data(), m, n);
  // Coefficient-order product: each output element is one dot over k, so a
  // row of the result is bitwise independent of every other row. The online
  // prefix-replay contract relies on this.
  O.noalias() = A.lazyProduct(B);

  if (should_record({&a, &b})) {
    out.set_requires_grad(true);
    auto ad = a.data();
    auto bd = b.data();
    auto od = out.data();
    Tape::active().record([ad, bd, od, m, k, n]() {
      if (od->grad.size() == 0) return;
      MapCM G(od->grad.data(), m, n);
      if (ad->requires_grad) {
        ensure_grad_buffer(*ad);
        MapM GA(ad->grad.data(), m, k);
        MapCM B(bd->values.data(), k, n);
        GA.noalias() += G * B.transpose();
      }
      if (bd->requires_grad) {
        ensure_grad_buffer(*bd);
        MapM GB(bd->grad.data(), k, n);
        MapCM A(ad->values.data(), m, k);
        GB.noalias() += A.transpose() * G;
      }
    });
  }
  return out;
}

Tensor conv1d_causal(const Tensor& x, const Tensor& w, std::size_t dilation) {
  if (dilation == 0) throw ParamError("conv1d_causal: dilation must be positive");
  check_rank2(x, "conv1d_causal input");
  if (w.rank() != 3) {
    throw ShapeError("conv1d_causal: weights must be [C_out x C_in x k], got " + shape_to_string(w.shape()));
  }
  if (w.dim(1) != x.dim(0)) {
    throw ShapeError("conv1d_causal: input channels " + shape_to_string(x.shape()) +
                     " do not match weights " + shape_to_string(w.shape()));
  }
  const Index c_in = static_cast<Index>(x.dim(0));
  const Index length = static_cast<Index>(x.dim(1));
  const Index c_out = static_cast<Index>(w.dim(0));
  const Index taps = static_cast<Index>(w.dim(2));

  Tensor out = Tensor::zeros({w.dim(0), x.dim(1)});
  MapCM X(x.values().data(), c_in, length);
  MapM O(out.values().data(), c_out, length);

  // Tap t reads the frame (k-1-t)*dilation steps in the past; left padding
  // is implicit in the shifted column ranges. lazyProduct keeps each output
  // column bitwise independent of the sequence length (prefix replay).
  for (Index t = 0; t < taps; ++t) {
    const Index shift = (taps - 1 - t) * static_cast<Index>(dilation);
    if (shift >= length) continue;
    MatrixRM wt(c_out, c_in);
    for (Index co = 0; co < c_out; ++co)
      for (Index ci = 0; ci < c_in; ++ci) wt(co, ci) = w.values()((co * c_in + ci) * taps + t);
    O.block(0, shift, c_out, length - shift).noalias() +=
        wt.lazyProduct(X.block(0, 0, c_in, length - shift));
  }

  if (should_record({&x, &w})) {
    out.set_requires_grad(true);
    auto xd = x.data();
    auto wd = w.data();
    auto od = out.data();
    const Index dil = static_cast<Index>(dilation);
    Tape::active().record([xd, wd, od, c_in, c_out, length, taps, dil]() {
      if (od->grad.size() == 0) return;
      MapCM G(od->grad.data(), c_out, length);
      MapCM X(xd->values.data(), c_in, length);
      for (Index t = 0; t < taps; ++t) {
        const Index shift = (taps - 1 - t) * dil;
        if (shift >= length) continue;
        const Index span = length - shift;
        if (xd->requires_grad) {
          MatrixRM wt(c_out, c_in);
          for (Index co = 0; co < c_out; ++co)
            for (Index ci = 0; ci < c_in; ++ci) wt(co, ci) = wd->values((co * c_in + ci) * taps + t);
          ensure_grad_buffer(*xd);
          MapM GX(xd->grad.data(), c_in, length);
          GX.block(0, 0, c_in, span).noalias() += wt.transpose() * G.block(0, shift, c_out, span);
        }
        if (wd->requires_grad) {
          ensure_grad_buffer(*wd);
          MatrixRM gw(c_out, c_in);
          gw.noalias() = G.block(0, shift, c_out, span) * X.block(0, 0, c_in, span).transpose();
          for (Index co = 0; co < c_out; ++co)
            for (Index ci = 0; ci < c_in; ++ci) wd->grad((co * c_in + ci) * taps + t) += gw(co, ci);
        }
      }
    });
  }
  return out;
}

Tensor softmax(const Tensor& logits, double temperature) {
  if (!(temperature > 0.0)) throw ParamError("softmax: temperature must be positive");
  const std::size_t classes = last_dim(logits, "softmax");
  const Index c = static_cast<Index>(classes);
  const Index rows = static_cast<Index>(logits.size() / classes);

  ArrayX out_values(logits.values().size());
  for (Index r = 0; r < rows; ++r) {
    auto row = logits.values().segment(r * c, c);
    const double m = row.maxCoeff();
    ArrayX e = ((row - m) / temperature).exp();
    out_values.segment(r * c, c) = e / e.sum();
  }

  Tensor out = Tensor::from_array(logits.shape(), std::move(out_values));
  if (should_record({&logits})) {
    out.set_requires_grad(true);
    auto xd = logits.data();
    auto od = out.data();
    Tape::active().record([xd, od, rows, c, temperature]() {
      if (od->grad.size() == 0 || !xd->requires_grad) return;
      ensure_grad_buffer(*xd);
      for (Index r = 0; r < rows; ++r) {
        auto y = od->values.segment(r * c, c);
        auto g = od->grad.segment(r * c, c);
        const double dot = (g * y).sum();
        xd->grad.segment(r * c, c) += y * (g - dot) / temperature;
      }
    });
  }
  return out;
}

Tensor log_softmax(const Tensor& logits, double temperature) {
  if (!(temperature > 0.0)) throw ParamError("log_softmax: temperature must be positive");
  const std::size_t classes = last_dim(logits, "log_softmax");
  const Index c = static_cast<Index>(classes);
  const Index rows = static_cast<Index>(logits.size() / classes);

  ArrayX out_values(logits.values().size());
  for (Index r = 0; r < rows; ++r) {
    auto row = logits.values().segment(r * c, c);
    const double m = row.maxCoeff();
    ArrayX z = (row - m) / temperature;
    const double lse = std::log(z.exp().sum());
    out_values.segment(r * c, c) = z - lse;
  }

  Tensor out = Tensor::from_array(logits.shape(), std::move(out_values));
  if (should_record({&logits})) {
    out.set_requires_grad(true);
    auto xd = logits.data();
    auto od = out.data();
    Tape::active().record([xd, od, rows, c, temperature]() {
      if (od->grad.size() == 0 || !xd->requires_grad) return;
      ensure_grad_buffer(*xd);
      for (Index r = 0; r < rows; ++r) {
        auto s = od->values.segment(r * c, c);
        auto g = od->grad.segment(r * c, c);
        const double gsum = g.sum();
        xd->grad.segment(r * c, c) += (g - s.exp() * gsum) / temperature;
      }
    });
  }
  return out;
}

namespace {
constexpr double kL2Eps = 1e-12;
}

Tensor l2_normalize(const Tensor& z) {
  check_rank2(z, "l2_normalize");
  const Index n = static_cast<Index>(z.dim(0));
  const Index d = static_cast<Index>(z.dim(1));

  ArrayX out_values(z.values().size());
  for (Index r = 0; r < n; ++r) {
    auto row = z.values().segment(r * d, d);
    const double denom = std::max(std::sqrt((row * row).sum()), kL2Eps);
    out_values.segment(r * d, d) = row / denom;
  }

  Tensor out = Tensor::from_array(z.shape(), std::move(out_values));
  if (should_record({&z})) {
    out.set_requires_grad(true);
    auto xd = z.data();
    auto od = out.data();
    Tape::active().record([xd, od, n, d]() {
      if (od->grad.size() == 0 || !xd->requires_grad) return;
      ensure_grad_buffer(*xd);
      for (Index r = 0; r < n; ++r) {
        auto x = xd->values.segment(r * d, d);
        auto y = od->values.segment(r * d, d);
        auto g = od->grad.segment(r * d, d);
        const double norm = std::sqrt((x * x).sum());
        const double denom = std::max(norm, kL2Eps);
        if (norm > kL2Eps) {
          const double dot = (y * g).sum();
          xd->grad.segment(r * d, d) += (g - y * dot) / denom;
        } else {
          xd->grad.segment(r * d, d) += g / denom;
        }
      }
    });
  }
  return out;
}

Tensor clamp_max(const Tensor& x, double ceiling) {
  return record_unary(x, x.values().min(ceiling),
                      [ceiling](const TensorData& in, const TensorData&) {
                        return ArrayX((in.values < ceiling).cast<double>());
                      });
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  return record_binary(
      a, b, a.values() + b.values(),
      [](const TensorData&, const TensorData&) { return 1.0; },
      [](const TensorData&, const TensorData&) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  return record_binary(
      a, b, a.values() - b.values(),
      [](const TensorData&, const TensorData&) { return 1.0; },
      [](const TensorData&, const TensorData&) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  return record_binary(
      a, b, a.values() * b.values(),
      [](const TensorData&, const TensorData& bb) { return ArrayX(bb.values); },
      [](const TensorData& aa, const TensorData&) { return ArrayX(aa.values); });
}

Tensor div(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "div");
  if ((b.values() == 0.0).any()) throw NumericDomainError("div requires a nonzero divisor");
  return record_binary(
      a, b, a.values() / b.values(),
      [](const TensorData&, const TensorData& bb) { return ArrayX(1.0 / bb.values); },
      [](const TensorData& aa, const TensorData& bb) {
        return ArrayX(-aa.values / (bb.values * bb.values));
      });
}

Tensor scale(const Tensor& x, double c) {
  return record_unary(x, x.values() * c,
                      [c](const TensorData&, const TensorData&) { return c; });
}

Tensor add_scalar(const Tensor& x, double c) {
  return record_unary(x, x.values() + c, [](const TensorData&, const TensorData&) { return 1.0; });
}

Tensor exp(const Tensor& x) {
  return record_unary(x, x.values().exp(),
                      [](const TensorData&, const TensorData& out) { return ArrayX(out.values); });
}

Tensor log(const Tensor& x) {
  if ((x.values() <= 0.0).any()) throw NumericDomainError("log requires positive inputs");
  return record_unary(x, x.values().log(), [](const TensorData& in, const TensorData&) {
    return ArrayX(1.0 / in.values);
  });
}

Tensor abs(const Tensor& x) {
  return record_unary(x, x.values().abs(), [](const TensorData& in, const TensorData&) {
    return ArrayX(in.values.sign());
  });
}

Tensor square(const Tensor& x) {
  return record_unary(x, x.values().square(), [](const TensorData& in, const TensorData&) {
    return ArrayX(2.0 * in.values);
  });
}

Tensor sigmoid(const Tensor& x) {
  return record_unary(x, 1.0 / (1.0 + (-x.values()).exp()),
                      [](const TensorData&, const TensorData& out) {
                        return ArrayX(out.values * (1.0 - out.values));
                      });
}

Tensor tanh(const Tensor& x) {
  return record_unary(x, x.values().tanh(), [](const TensorData&, const TensorData& out) {
    return ArrayX(1.0 - out.values.square());
  });
}

Tensor relu(const Tensor& x) {
  return record_unary(x, x.values().max(0.0), [](const TensorData& in, const TensorData&) {
    return ArrayX((in.values > 0.0).cast<double>());
  });
}

Tensor sum(const Tensor& x) {
  Tensor out = Tensor::scalar(x.values().sum());
  if (should_record({&x})) {
    out.set_requires_grad(true);
    auto xd = x.data();
    auto od = out.data();
    Tape::active().record([xd, od]() {
      if (od->grad.size() == 0 || !xd->requires_grad) return;
      accumulate_grad(*xd, ArrayX::Constant(xd->values.size(), od->grad(0)));
    });
  }
  return out;
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.size())); }

Tensor sum_last(const Tensor& x) {
  const std::size_t classes = last_dim(x, "sum_last");
  const Index c = static_cast<Index>(classes);
  const Index rows = static_cast<Index>(x.size() / classes);
  Shape out_shape(x.shape().begin(), x.shape().end() - 1);

  ArrayX out_values(rows);
  for (Index r = 0; r < rows; ++r) out_values(r) = x.values().segment(r * c, c).sum();

  Tensor out = Tensor::from_array(std::move(out_shape), std::move(out_values));
  if (should_record({&x})) {
    out.set_requires_grad(true);
    auto xd = x.data();
    auto od = out.data();
    Tape::active().record([xd, od, rows, c]() {
      if (od->grad.size() == 0 || !xd->requires_grad) return;
      ensure_grad_buffer(*xd);
      for (Index r = 0; r < rows; ++r) xd->grad.segment(r * c, c) += od->grad(r);
    });
  }
  return out;
}

Tensor mean_last(const Tensor& x) {
  return scale(sum_last(x), 1.0 / static_cast<double>(last_dim(x, "mean_last")));
}

Tensor transpose(const Tensor& x) {
  check_rank2(x, "transpose");
  const Index m = static_cast<Index>(x.dim(0));
  const Index n = static_cast<Index>(x.dim(1));
  Tensor out = Tensor::zeros({x.dim(1), x.dim(0)});
  MapCM X(x.values().data(), m, n);
  MapM O(out.values().data(), n, m);
  O = X.transpose();

  if (should_record({&x})) {
    out.set_requires_grad(true);
    auto xd = x.data();
    auto od = out.data();
    Tape::active().record([xd, od, m, n]() {
      if (od->grad.size() == 0 || !xd->requires_grad) return;
      ensure_grad_buffer(*xd);
      MapCM G(od->grad.data(), n, m);
      MapM GX(xd->grad.data(), m, n);
      GX += G.transpose();
    });
  }
  return out;
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  check_rank2(x, "slice_rows");
  if (begin >= end || end > x.dim(0)) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") invalid for " + shape_to_string(x.shape()));
  }
  const Index cols = static_cast<Index>(x.dim(1));
  const Index b = static_cast<Index>(begin);
  const Index rows = static_cast<Index>(end - begin);

  Tensor out = Tensor::from_array({end - begin, x.dim(1)},
                                  ArrayX(x.values().segment(b * cols, rows * cols)));
  if (should_record({&x})) {
    out.set_requires_grad(true);
    auto xd = x.data();
    auto od = out.data();
    Tape::active().record([xd, od, b, rows, cols]() {
      if (od->grad.size() == 0 || !xd->requires_grad) return;
      ensure_grad_buffer(*xd);
      xd->grad.segment(b * cols, rows * cols) += od->grad;
    });
  }
  return out;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no tensors given");
  const std::size_t cols = parts.front().rank() == 2 ? parts.front().dim(1) : 0;
  std::size_t total_rows = 0;
  for (const Tensor& p : parts) {
    check_rank2(p, "concat_rows");
    if (p.dim(1) != cols) {
      throw ShapeError("concat_rows: column counts differ, " + shape_to_string(parts.front().shape()) +
                       " vs " + shape_to_string(p.shape()));
    }
    total_rows += p.dim(0);
  }

  Tensor out = Tensor::zeros({total_rows, cols});
  Index offset = 0;
  for (const Tensor& p : parts) {
    out.values().segment(offset, p.values().size()) = p.values();
    offset += p.values().size();
  }

  bool track = Tape::active().recording();
  bool any_grad = false;
  for (const Tensor& p : parts) any_grad = any_grad || p.requires_grad();
  if (track && any_grad) {
    out.set_requires_grad(true);
    std::vector<std::shared_ptr<TensorData>> ins;
    ins.reserve(parts.size());
    for (const Tensor& p : parts) ins.push_back(p.data());
    auto od = out.data();
    Tape::active().record([ins, od]() {
      if (od->grad.size() == 0) return;
      Index offset = 0;
      for (const auto& in : ins) {
        const Index n = in->values.size();
        if (in->requires_grad) accumulate_grad(*in, ArrayX(od->grad.segment(offset, n)));
        offset += n;
      }
    });
  }
  return out;
}

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
  check_rank2(x, "add_row_bias");
  if (bias.rank() != 1 || bias.dim(0) != x.dim(1)) {
    throw ShapeError("add_row_bias: bias " + shape_to_string(bias.shape()) + " does not match " +
                     shape_to_string(x.shape()));
  }
  const Index n = static_cast<Index>(x.dim(0));
  const Index d = static_cast<Index>(x.dim(1));

  Tensor out = Tensor::zeros({x.dim(0), x.dim(1)});
  MapCM X(x.values().data(), n, d);
  MapM O(out.values().data(), n, d);
  O = X;
  O.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.values().data(), d);

  if (should_record({&x, &bias})) {
    out.set_requires_grad(true);
    auto xd = x.data();
    auto bd = bias.data();
    auto od = out.data();
    Tape::active().record([xd, bd, od, n, d]() {
      if (od->grad.size() == 0) return;
      if (xd->requires_grad) accumulate_grad(*xd, od->grad);
      if (bd->requires_grad) {
        ensure_grad_buffer(*bd);
        MapCM G(od->grad.data(), n, d);
        Eigen::Map<Eigen::RowVectorXd>(bd->grad.data(), d) += G.colwise().sum();
      }
    });
  }
  return out;
}

Tensor add_channel_bias(const Tensor& x, const Tensor& bias) {
  check_rank2(x, "add_channel_bias");
  if (bias.rank() != 1 || bias.dim(0) != x.dim(0)) {
    throw ShapeError("add_channel_bias: bias " + shape_to_string(bias.shape()) + " does not match " +
                     shape_to_string(x.shape()));
  }
  const Index c = static_cast<Index>(x.dim(0));
  const Index l = static_cast<Index>(x.dim(1));

  Tensor out = Tensor::zeros({x.dim(0), x.dim(1)});
  MapCM X(x.values().data(), c, l);
  MapM O(out.values().data(), c, l);
  O = X;
  O.colwise() += Eigen::Map<const Eigen::VectorXd>(bias.values().data(), c);

  if (should_record({&x, &bias})) {
    out.set_requires_grad(true);
    auto xd = x.data();
    auto bd = bias.data();
    auto od = out.data();
    Tape::active().record([xd, bd, od, c, l]() {
      if (od->grad.size() == 0) return;
      if (xd->requires_grad) accumulate_grad(*xd, od->grad);
      if (bd->requires_grad) {
        ensure_grad_buffer(*bd);
        MapCM G(od->grad.data(), c, l);
        Eigen::Map<Eigen::VectorXd>(bd->grad.data(), c) += G.rowwise().sum();
      }
    });
  }
  return out;
}

std::vector<int> argmax_rows(const Tensor& x) {
  const std::size_t classes = last_dim(x, "argmax_rows");
  const Index c = static_cast<Index>(classes);
  const Index rows = static_cast<Index>(x.size() / classes);
  std::vector<int> out(static_cast<std::size_t>(rows));
  for (Index r = 0; r < rows; ++r) {
    Index best = 0;
    x.values().segment(r * c, c).maxCoeff(&best);
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace phasekd
