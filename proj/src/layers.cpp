#include "phasekd/layers.hpp"

#include <cmath>

namespace phasekd {

Tensor xavier_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = Tensor::zeros(shape);
  for (Eigen::Index i = 0; i < t.values().size(); ++i) t.values()(i) = rng.uniform(-bound, bound);
  t.set_requires_grad(true);
  return t;
}

namespace {

Tensor zero_bias(std::size_t n) {
  Tensor t = Tensor::zeros({n});
  t.set_requires_grad(true);
  return t;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  return add_row_bias(matmul(x, weight), bias);
}

}  // namespace

EncoderModel::EncoderModel(const EncoderArch& arch, std::uint64_t seed) : arch_(arch) {
  Rng rng(seed);
  const std::size_t proj_hidden = arch.feature_dim;
  params_.add("backbone.fc1.weight", xavier_uniform({arch.raw_dim, arch.hidden_dim}, arch.raw_dim, arch.hidden_dim, rng));
  params_.add("backbone.fc1.bias", zero_bias(arch.hidden_dim));
  params_.add("backbone.fc2.weight", xavier_uniform({arch.hidden_dim, arch.feature_dim}, arch.hidden_dim, arch.feature_dim, rng));
  params_.add("backbone.fc2.bias", zero_bias(arch.feature_dim));
  params_.add("classifier.weight", xavier_uniform({arch.feature_dim, arch.num_classes}, arch.feature_dim, arch.num_classes, rng));
  params_.add("classifier.bias", zero_bias(arch.num_classes));
  params_.add("projection.fc1.weight", xavier_uniform({arch.feature_dim, proj_hidden}, arch.feature_dim, proj_hidden, rng));
  params_.add("projection.fc1.bias", zero_bias(proj_hidden));
  params_.add("projection.fc2.weight", xavier_uniform({proj_hidden, arch.proj_dim}, proj_hidden, arch.proj_dim, rng));
  params_.add("projection.fc2.bias", zero_bias(arch.proj_dim));
}

EncoderModel::Output EncoderModel::forward(const Tensor& batch) const {
  if (batch.rank() != 2 || batch.dim(1) != arch_.raw_dim) {
    throw ShapeError("encoder expects [n x " + std::to_string(arch_.raw_dim) + "] input, got " +
                     shape_to_string(batch.shape()));
  }
  Tensor h = relu(linear(batch, params_.get("backbone.fc1.weight"), params_.get("backbone.fc1.bias")));
  Tensor features = relu(linear(h, params_.get("backbone.fc2.weight"), params_.get("backbone.fc2.bias")));
  Tensor logits = linear(features, params_.get("classifier.weight"), params_.get("classifier.bias"));
  Tensor p = relu(linear(features, params_.get("projection.fc1.weight"), params_.get("projection.fc1.bias")));
  Tensor projection = linear(p, params_.get("projection.fc2.weight"), params_.get("projection.fc2.bias"));
  return {features, logits, projection};
}

const char* decoder_kind_name(DecoderKind kind) {
  return kind == DecoderKind::kGru ? "gru" : "tcn";
}

DecoderKind decoder_kind_from_name(const std::string& name) {
  if (name == "gru") return DecoderKind::kGru;
  if (name == "tcn") return DecoderKind::kTcn;
  throw ParamError("unknown decoder kind: " + name);
}

GruDecoder::GruDecoder(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                       std::uint64_t seed)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), num_classes_(num_classes) {
  Rng rng(seed);
  for (const char* gate : {"reset", "update", "candidate"}) {
    params_.add(std::string("gru.") + gate + ".input", xavier_uniform({input_dim, hidden_dim}, input_dim, hidden_dim, rng));
    params_.add(std::string("gru.") + gate + ".hidden", xavier_uniform({hidden_dim, hidden_dim}, hidden_dim, hidden_dim, rng));
    params_.add(std::string("gru.") + gate + ".bias", zero_bias(hidden_dim));
  }
  params_.add("out.weight", xavier_uniform({hidden_dim, num_classes}, hidden_dim, num_classes, rng));
  params_.add("out.bias", zero_bias(num_classes));
}

std::vector<Tensor> GruDecoder::forward(const Tensor& features) const {
  if (features.rank() != 2 || features.dim(1) != input_dim_) {
    throw ShapeError("gru decoder expects [L x " + std::to_string(input_dim_) + "] features, got " +
                     shape_to_string(features.shape()));
  }
  const std::size_t length = features.dim(0);
  const Tensor& w_xr = params_.get("gru.reset.input");
  const Tensor& w_hr = params_.get("gru.reset.hidden");
  const Tensor& b_r = params_.get("gru.reset.bias");
  const Tensor& w_xz = params_.get("gru.update.input");
  const Tensor& w_hz = params_.get("gru.update.hidden");
  const Tensor& b_z = params_.get("gru.update.bias");
  const Tensor& w_xn = params_.get("gru.candidate.input");
  const Tensor& w_hn = params_.get("gru.candidate.hidden");
  const Tensor& b_n = params_.get("gru.candidate.bias");

  Tensor h = Tensor::zeros({1, hidden_dim_});
  std::vector<Tensor> states;
  states.reserve(length);
  for (std::size_t l = 0; l < length; ++l) {
    Tensor x = slice_rows(features, l, l + 1);
    Tensor r = sigmoid(add_row_bias(add(matmul(x, w_xr), matmul(h, w_hr)), b_r));
    Tensor z = sigmoid(add_row_bias(add(matmul(x, w_xz), matmul(h, w_hz)), b_z));
    Tensor candidate = tanh(add_row_bias(add(matmul(x, w_xn), matmul(mul(r, h), w_hn)), b_n));
    Tensor keep = add_scalar(scale(z, -1.0), 1.0);
    h = add(mul(keep, candidate), mul(z, h));
    states.push_back(h);
  }
  Tensor stacked = concat_rows(states);
  Tensor logits = add_row_bias(matmul(stacked, params_.get("out.weight")), params_.get("out.bias"));
  return {logits};
}

std::unique_ptr<Decoder> GruDecoder::clone_architecture(std::uint64_t seed) const {
  return std::make_unique<GruDecoder>(input_dim_, hidden_dim_, num_classes_, seed);
}

TcnDecoder::TcnDecoder(std::size_t input_dim, std::size_t num_classes, std::size_t stages,
                       std::size_t blocks, std::size_t channels, std::size_t kernel,
                       std::uint64_t seed)
    : input_dim_(input_dim),
      num_classes_(num_classes),
      stages_(stages),
      blocks_(blocks),
      channels_(channels),
      kernel_(kernel) {
  if (stages_ < 1) throw ParamError("tcn decoder needs at least one stage");
  Rng rng(seed);
  for (std::size_t s = 0; s < stages_; ++s) {
    const std::string prefix = "stage" + std::to_string(s) + ".";
    const std::size_t in_ch = s == 0 ? input_dim_ : num_classes_;
    params_.add(prefix + "in.weight", xavier_uniform({channels_, in_ch, 1}, in_ch, channels_, rng));
    params_.add(prefix + "in.bias", zero_bias(channels_));
    for (std::size_t b = 0; b < blocks_; ++b) {
      const std::string block = prefix + "block" + std::to_string(b) + ".";
      params_.add(block + "dilated.weight",
                  xavier_uniform({channels_, channels_, kernel_}, channels_ * kernel_, channels_ * kernel_, rng));
      params_.add(block + "dilated.bias", zero_bias(channels_));
      params_.add(block + "pointwise.weight", xavier_uniform({channels_, channels_, 1}, channels_, channels_, rng));
      params_.add(block + "pointwise.bias", zero_bias(channels_));
    }
    params_.add(prefix + "out.weight", xavier_uniform({num_classes_, channels_, 1}, channels_, num_classes_, rng));
    params_.add(prefix + "out.bias", zero_bias(num_classes_));
  }
}

std::vector<Tensor> TcnDecoder::forward(const Tensor& features) const {
  if (features.rank() != 2 || features.dim(1) != input_dim_) {
    throw ShapeError("tcn decoder expects [L x " + std::to_string(input_dim_) + "] features, got " +
                     shape_to_string(features.shape()));
  }
  std::vector<Tensor> stage_logits;
  Tensor stage_input = transpose(features);  // [C_in x L]
  for (std::size_t s = 0; s < stages_; ++s) {
    const std::string prefix = "stage" + std::to_string(s) + ".";
    Tensor cur = add_channel_bias(conv1d_causal(stage_input, params_.get(prefix + "in.weight"), 1),
                                  params_.get(prefix + "in.bias"));
    for (std::size_t b = 0; b < blocks_; ++b) {
      const std::string block = prefix + "block" + std::to_string(b) + ".";
      const std::size_t dilation = std::size_t{1} << b;
      Tensor t = relu(add_channel_bias(conv1d_causal(cur, params_.get(block + "dilated.weight"), dilation),
                                       params_.get(block + "dilated.bias")));
      Tensor p = add_channel_bias(conv1d_causal(t, params_.get(block + "pointwise.weight"), 1),
                                  params_.get(block + "pointwise.bias"));
      cur = add(cur, p);
    }
    Tensor logits_cl = add_channel_bias(conv1d_causal(cur, params_.get(prefix + "out.weight"), 1),
                                        params_.get(prefix + "out.bias"));
    Tensor logits = transpose(logits_cl);  // [L x C]
    stage_logits.push_back(logits);
    if (s + 1 < stages_) stage_input = transpose(softmax(logits, 1.0));
  }
  return stage_logits;
}

std::unique_ptr<Decoder> TcnDecoder::clone_architecture(std::uint64_t seed) const {
  return std::make_unique<TcnDecoder>(input_dim_, num_classes_, stages_, blocks_, channels_, kernel_, seed);
}

std::unique_ptr<Decoder> make_decoder(DecoderKind kind, std::size_t input_dim,
                                      std::size_t num_classes, const DecoderArch& arch,
                                      std::uint64_t seed) {
  if (kind == DecoderKind::kGru) {
    return std::make_unique<GruDecoder>(input_dim, arch.gru_hidden, num_classes, seed);
  }
  return std::make_unique<TcnDecoder>(input_dim, num_classes, arch.tcn_stages, arch.tcn_blocks,
                                      arch.tcn_channels, arch.tcn_kernel, seed);
}

}  // namespace phasekd
