#include "phasekd/losses.hpp"

#include <algorithm>

#include "phasekd/ops.hpp"

namespace phasekd {

SimilarityKind similarity_from_name(const std::string& name) {
  if (name == "mse") return SimilarityKind::kMse;
  if (name == "kl") return SimilarityKind::kKl;
  throw ParamError("unknown similarity kind: " + name);
}

const char* similarity_name(SimilarityKind kind) {
  return kind == SimilarityKind::kMse ? "mse" : "kl";
}

void validate(const DecoderLossConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw ParamError("truncation threshold must be positive");
  if (!(cfg.temperature > 0.0)) throw ParamError("temperature must be positive");
  if (cfg.lambda < 0.0) throw ParamError("lambda must be nonnegative");
  if (cfg.teacher_frame_offset != 0 && cfg.teacher_frame_offset != 1) {
    throw ParamError("teacher_frame_offset must be 0 or 1");
  }
}

Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  return cross_entropy(logits, labels, std::vector<bool>(labels.size(), true));
}

Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                     const std::vector<bool>& labeled) {
  if (logits.rank() != 2) throw ShapeError("cross_entropy expects [n x C] logits");
  const std::size_t n = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  if (labels.size() != n || labeled.size() != n) {
    throw ShapeError("cross_entropy: got " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(n) + " rows");
  }

  std::size_t n_labeled = 0;
  Tensor pick = Tensor::zeros({n, classes});
  for (std::size_t i = 0; i < n; ++i) {
    if (!labeled[i]) continue;
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
      throw LabelError("label " + std::to_string(labels[i]) + " outside [0, " +
                       std::to_string(classes) + ")");
    }
    pick.values()(static_cast<Eigen::Index>(i * classes + static_cast<std::size_t>(labels[i]))) = 1.0;
    ++n_labeled;
  }
  if (n_labeled == 0) return Tensor::scalar(0.0);

  Tensor log_probs = log_softmax(logits, 1.0);
  return scale(sum(mul(pick, log_probs)), -1.0 / static_cast<double>(n_labeled));
}

Tensor feature_similarity_mse(const Tensor& z_student, const Tensor& z_teacher) {
  if (z_student.shape() != z_teacher.shape() || z_student.rank() != 2) {
    throw ShapeError("feature similarity: shapes " + shape_to_string(z_student.shape()) + " and " +
                     shape_to_string(z_teacher.shape()) + " do not match");
  }
  const double n = static_cast<double>(z_student.dim(0));
  Tensor diff = sub(l2_normalize(z_student), l2_normalize(z_teacher.detach()));
  return scale(sum(square(diff)), 1.0 / n);
}

Tensor feature_similarity_kl(const Tensor& z_student, const Tensor& z_teacher, double temperature) {
  if (z_student.shape() != z_teacher.shape() || z_student.rank() != 2) {
    throw ShapeError("feature similarity: shapes " + shape_to_string(z_student.shape()) + " and " +
                     shape_to_string(z_teacher.shape()) + " do not match");
  }
  if (!(temperature > 0.0)) throw ParamError("temperature must be positive");
  const double n = static_cast<double>(z_student.dim(0));
  Tensor teacher = z_teacher.detach();
  Tensor p_teacher = softmax(teacher, temperature);
  Tensor log_p_teacher = log_softmax(teacher, temperature);
  Tensor log_p_student = log_softmax(z_student, temperature);
  return scale(sum(mul(p_teacher, sub(log_p_teacher, log_p_student))), 1.0 / n);
}

EncoderLossTerms encoder_self_kd_loss(const Tensor& logits, const std::vector<int>& labels,
                                      const std::vector<bool>& labeled, const Tensor& z_student,
                                      const Tensor& z_teacher, const EncoderLossConfig& cfg) {
  Tensor classification = cross_entropy(logits, labels, labeled);
  Tensor similarity = cfg.similarity_kind == SimilarityKind::kMse
                          ? feature_similarity_mse(z_student, z_teacher)
                          : feature_similarity_kl(z_student, z_teacher, cfg.kl_temperature);
  return {add(classification, similarity), classification, similarity};
}

Tensor truncated_mse_smoothing(const Tensor& student_logits, const Tensor& teacher_logits,
                               const DecoderLossConfig& cfg) {
  validate(cfg);
  if (student_logits.shape() != teacher_logits.shape() || student_logits.rank() != 2) {
    throw ShapeError("truncated_mse_smoothing: shapes " + shape_to_string(student_logits.shape()) +
                     " and " + shape_to_string(teacher_logits.shape()) + " do not match");
  }
  const std::size_t length = student_logits.dim(0);
  const std::size_t offset = static_cast<std::size_t>(cfg.teacher_frame_offset);
  if (length < 1 + offset) {
    throw SequenceLengthError("sequence of length " + std::to_string(length) +
                              " is too short for teacher frame offset " + std::to_string(offset));
  }
  Tensor student_logp = log_softmax(student_logits, cfg.temperature);
  Tensor teacher_logp = log_softmax(teacher_logits.detach(), cfg.temperature);
  Tensor s = slice_rows(student_logp, offset, length);
  Tensor t = slice_rows(teacher_logp, 0, length - offset);
  Tensor delta = clamp_max(abs(sub(s, t)), cfg.tau);
  return mean(square(delta));
}

DecoderLossTerms decoder_self_kd_loss(const std::vector<Tensor>& student_stages,
                                      const std::vector<int>& labels, bool labeled,
                                      const std::optional<std::vector<Tensor>>& teacher_stages,
                                      const DecoderLossConfig& cfg) {
  validate(cfg);
  if (student_stages.empty()) throw ShapeError("decoder loss: no stage logits given");
  if (teacher_stages && teacher_stages->size() != student_stages.size()) {
    throw StructuralError("decoder loss: student has " + std::to_string(student_stages.size()) +
                          " stages but teacher has " + std::to_string(teacher_stages->size()));
  }

  const std::vector<bool> mask(labels.size(), labeled);
  Tensor classification = Tensor::scalar(0.0);
  Tensor smoothing = Tensor::scalar(0.0);
  const bool smooth = teacher_stages.has_value() && cfg.lambda > 0.0;
  for (std::size_t s = 0; s < student_stages.size(); ++s) {
    classification = add(classification, cross_entropy(student_stages[s], labels, mask));
    if (smooth) {
      smoothing = add(smoothing, truncated_mse_smoothing(student_stages[s], (*teacher_stages)[s], cfg));
    }
  }
  Tensor total = smooth ? add(classification, scale(smoothing, cfg.lambda)) : classification;
  return {total, classification, smoothing};
}

}  // namespace phasekd
