#pragma once

#include <vector>

#include "phasekd/tensor.hpp"

namespace phasekd {

/// Matrix product of two rank-2 tensors [m x k] * [k x n] -> [m x n].
Tensor matmul(const Tensor& a, const Tensor& b);

/// Causal dilated 1-D convolution. x is [C_in x L], w is [C_out x C_in x k].
/// The input is implicitly left-padded with (k-1)*dilation zeros, so the
/// output has length L and frame l depends on input frames <= l only. Tap
/// k-1 reads the current frame, tap 0 the oldest.
Tensor conv1d_causal(const Tensor& x, const Tensor& w, std::size_t dilation);

/// softmax(x / temperature) along the last axis, max-stabilized.
Tensor softmax(const Tensor& logits, double temperature);

/// log(softmax(x / temperature)) in fused, max-stabilized form.
Tensor log_softmax(const Tensor& logits, double temperature);

/// Divides each row of [n x d] by max(||row||_2, 1e-12).
Tensor l2_normalize(const Tensor& z);

/// Elementwise min(x, ceiling). Gradient is 1 below the ceiling, 0 at and
/// above it.
Tensor clamp_max(const Tensor& x, double ceiling);

// Elementwise binary ops over equal-shape tensors.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);  // rejects zero divisors

// Scalar-tensor ops.
Tensor scale(const Tensor& x, double c);
Tensor add_scalar(const Tensor& x, double c);

// Elementwise unary ops. abs'(0) = 0 and relu'(0) = 0 by convention.
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);  // rejects non-positive inputs
Tensor abs(const Tensor& x);
Tensor square(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);

// Reductions to a scalar tensor, and over the trailing axis.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor sum_last(const Tensor& x);
Tensor mean_last(const Tensor& x);

/// Transpose of a rank-2 tensor.
Tensor transpose(const Tensor& x);

/// Rows [begin, end) of a rank-2 tensor.
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);

/// Stacks rank-2 tensors with equal column counts along the row axis.
Tensor concat_rows(const std::vector<Tensor>& parts);

/// x[n x d] + bias[d], the bias added to every row (linear-layer layout).
Tensor add_row_bias(const Tensor& x, const Tensor& bias);

/// x[C x L] + bias[C], the bias added along every row (conv-channel layout).
Tensor add_channel_bias(const Tensor& x, const Tensor& bias);

/// Index of the maximum entry per row of [n x C]; ties go to the lower index.
std::vector<int> argmax_rows(const Tensor& x);

}  // namespace phasekd
