#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "phasekd/ops.hpp"
#include "phasekd/params.hpp"
#include "phasekd/rng.hpp"

namespace phasekd {

struct EncoderArch {
  std::size_t raw_dim = 128;
  std::size_t hidden_dim = 256;
  std::size_t feature_dim = 256;
  std::size_t proj_dim = 64;  // projection head hidden width equals feature_dim
  std::size_t num_classes = 7;
};

/// Frame encoder: MLP backbone plus a classifier head and a projection head,
/// both consuming the same backbone features.
class EncoderModel {
 public:
  EncoderModel(const EncoderArch& arch, std::uint64_t seed);

  struct Output {
    Tensor features;    // [n x feature_dim]
    Tensor logits;      // [n x C]
    Tensor projection;  // [n x proj_dim]
  };

  /// Single backbone pass feeding both heads. batch is [n x raw_dim].
  Output forward(const Tensor& batch) const;

  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  const EncoderArch& arch() const { return arch_; }
  std::size_t parameter_count() const { return params_.value_count(); }

 private:
  EncoderArch arch_;
  ParameterSet params_;
};

enum class DecoderKind { kGru, kTcn };

const char* decoder_kind_name(DecoderKind kind);
DecoderKind decoder_kind_from_name(const std::string& name);

struct DecoderArch {
  std::size_t gru_hidden = 128;
  std::size_t tcn_stages = 2;
  std::size_t tcn_blocks = 8;
  std::size_t tcn_channels = 64;
  std::size_t tcn_kernel = 3;
};

/// Causal temporal decoder over a per-frame feature sequence. forward()
/// returns one logits sequence per stage; predictions for frame l are a
/// function of features 0..l only.
class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual std::vector<Tensor> forward(const Tensor& features) const = 0;
  virtual DecoderKind kind() const = 0;
  virtual std::unique_ptr<Decoder> clone_architecture(std::uint64_t seed) const = 0;
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  std::size_t parameter_count() const { return params_.value_count(); }

 protected:
  ParameterSet params_;
};

/// Single-layer gated recurrent unit followed by a linear classifier.
class GruDecoder final : public Decoder {
 public:
  GruDecoder(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
             std::uint64_t seed);
  std::vector<Tensor> forward(const Tensor& features) const override;
  DecoderKind kind() const override { return DecoderKind::kGru; }
  std::unique_ptr<Decoder> clone_architecture(std::uint64_t seed) const override;

 private:
  std::size_t input_dim_, hidden_dim_, num_classes_;
};

/// Multi-stage dilated causal TCN. Each stage is a 1x1 input conv, a stack
/// of residual dilated conv blocks (dilations 1, 2, 4, ...), and a 1x1 conv
/// to class logits. Stages past the first consume the softmax of the
/// previous stage's logits.
class TcnDecoder final : public Decoder {
 public:
  TcnDecoder(std::size_t input_dim, std::size_t num_classes, std::size_t stages,
             std::size_t blocks, std::size_t channels, std::size_t kernel, std::uint64_t seed);
  std::vector<Tensor> forward(const Tensor& features) const override;
  DecoderKind kind() const override { return DecoderKind::kTcn; }
  std::unique_ptr<Decoder> clone_architecture(std::uint64_t seed) const override;

 private:
  std::size_t input_dim_, num_classes_, stages_, blocks_, channels_, kernel_;
};

std::unique_ptr<Decoder> make_decoder(DecoderKind kind, std::size_t input_dim,
                                      std::size_t num_classes, const DecoderArch& arch,
                                      std::uint64_t seed);

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor xavier_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace phasekd
