#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phasekd/tensor.hpp"

namespace phasekd {

enum class SimilarityKind { kMse, kKl };

SimilarityKind similarity_from_name(const std::string& name);
const char* similarity_name(SimilarityKind kind);

struct EncoderLossConfig {
  SimilarityKind similarity_kind = SimilarityKind::kMse;
  std::size_t proj_dim = 64;
  bool symmetrize = false;
  double kl_temperature = 1.0;
};

struct DecoderLossConfig {
  double lambda = 0.3;           // weight of the smoothing term
  double tau = 8.0;              // truncation threshold
  double temperature = 2.0;      // distillation temperature
  int teacher_frame_offset = 1;  // teacher evaluated at frame l - offset
};

void validate(const DecoderLossConfig& cfg);

/// Mean over samples of -log softmax(logits)[label]. The optional mask
/// restricts the mean to labeled samples; with no labeled samples the loss
/// is a constant zero.
Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels);
Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                     const std::vector<bool>& labeled);

/// Mean over the batch of || z1/||z1|| - z2/||z2|| ||^2. The teacher side is
/// detached internally; no gradient ever reaches it. Value range [0, 4].
Tensor feature_similarity_mse(const Tensor& z_student, const Tensor& z_teacher);

/// KL(softmax(z_teacher/T) || softmax(z_student/T)), mean over the batch.
/// Teacher detached internally.
Tensor feature_similarity_kl(const Tensor& z_student, const Tensor& z_teacher, double temperature);

struct EncoderLossTerms {
  Tensor total;
  Tensor classification;
  Tensor similarity;
};

/// Classification plus feature-similarity loss with equal unit weights.
EncoderLossTerms encoder_self_kd_loss(const Tensor& logits, const std::vector<int>& labels,
                                      const std::vector<bool>& labeled, const Tensor& z_student,
                                      const Tensor& z_teacher, const EncoderLossConfig& cfg);

/// Truncated MSE between student and teacher log-probabilities:
///   delta[l, c] = |log p_student(l, c) - log p_teacher(l - offset, c)|
/// clamped at tau, squared, and averaged over the (L - offset) * C included
/// terms. Teacher detached internally; clamped terms carry no gradient.
Tensor truncated_mse_smoothing(const Tensor& student_logits, const Tensor& teacher_logits,
                               const DecoderLossConfig& cfg);

struct DecoderLossTerms {
  Tensor total;
  Tensor classification;
  Tensor smoothing;  // unweighted truncated-MSE sum across stages
};

/// Sum over stages of cross-entropy plus lambda * truncated MSE. Without a
/// teacher (first epoch) the smoothing term is omitted. Unlabeled videos
/// contribute no classification term.
DecoderLossTerms decoder_self_kd_loss(const std::vector<Tensor>& student_stages,
                                      const std::vector<int>& labels, bool labeled,
                                      const std::optional<std::vector<Tensor>>& teacher_stages,
                                      const DecoderLossConfig& cfg);

}  // namespace phasekd
