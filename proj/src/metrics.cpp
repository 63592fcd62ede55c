#include "phasekd/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "phasekd/errors.hpp"

namespace phasekd {

namespace {

void check_labels(const std::vector<int>& pred, const std::vector<int>& gt, int num_classes) {
  if (pred.size() != gt.size()) {
    throw ShapeError("frame_metrics: " + std::to_string(pred.size()) + " predictions vs " +
                     std::to_string(gt.size()) + " ground-truth labels");
  }
  if (pred.empty()) throw SequenceLengthError("frame_metrics: empty label sequence");
  for (int c : pred) {
    if (c < 0 || c >= num_classes) throw LabelError("prediction label " + std::to_string(c) + " out of range");
  }
  for (int c : gt) {
    if (c < 0 || c >= num_classes) throw LabelError("ground-truth label " + std::to_string(c) + " out of range");
  }
}

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

VideoMetrics frame_metrics(const std::vector<int>& pred, const std::vector<int>& gt, int num_classes) {
  check_labels(pred, gt, num_classes);
  const std::size_t length = pred.size();

  std::vector<long> tp(static_cast<std::size_t>(num_classes), 0);
  std::vector<long> fp(static_cast<std::size_t>(num_classes), 0);
  std::vector<long> fn(static_cast<std::size_t>(num_classes), 0);
  long correct = 0;
  for (std::size_t i = 0; i < length; ++i) {
    if (pred[i] == gt[i]) {
      ++correct;
      ++tp[static_cast<std::size_t>(gt[i])];
    } else {
      ++fp[static_cast<std::size_t>(pred[i])];
      ++fn[static_cast<std::size_t>(gt[i])];
    }
  }

  VideoMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(length);

  int present = 0;
  double precision_sum = 0.0, recall_sum = 0.0, f1_sum = 0.0, jaccard_sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const std::size_t ci = static_cast<std::size_t>(c);
    if (tp[ci] + fp[ci] + fn[ci] == 0) continue;  // class absent from gt and pred
    ++present;
    const double precision = safe_div(static_cast<double>(tp[ci]), static_cast<double>(tp[ci] + fp[ci]));
    const double recall = safe_div(static_cast<double>(tp[ci]), static_cast<double>(tp[ci] + fn[ci]));
    const double f1 = safe_div(2.0 * precision * recall, precision + recall);
    const double jaccard =
        safe_div(static_cast<double>(tp[ci]), static_cast<double>(tp[ci] + fp[ci] + fn[ci]));
    precision_sum += precision;
    recall_sum += recall;
    f1_sum += f1;
    jaccard_sum += jaccard;
  }
  m.precision = precision_sum / present;
  m.recall = recall_sum / present;
  m.f1 = f1_sum / present;
  m.jaccard = jaccard_sum / present;
  m.predicted_segments = segment_count(pred);
  m.gt_segments = segment_count(gt);
  return m;
}

std::size_t segment_count(const std::vector<int>& labels) {
  if (labels.empty()) throw SequenceLengthError("segment_count: empty label sequence");
  std::size_t segments = 1;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] != labels[i - 1]) ++segments;
  }
  return segments;
}

namespace {

MetricAggregate aggregate_one(const std::vector<VideoMetrics>& per_video,
                              double (*getter)(const VideoMetrics&)) {
  const double n = static_cast<double>(per_video.size());
  double mean = 0.0;
  for (const VideoMetrics& v : per_video) mean += getter(v);
  mean /= n;
  double var = 0.0;
  for (const VideoMetrics& v : per_video) {
    const double d = getter(v) - mean;
    var += d * d;
  }
  return {mean, std::sqrt(var / n)};
}

}  // namespace

MetricsReport aggregate(const std::vector<VideoMetrics>& per_video) {
  if (per_video.empty()) throw ParamError("aggregate: need at least one video");
  MetricsReport r;
  r.per_video = per_video;
  r.accuracy = aggregate_one(per_video, [](const VideoMetrics& v) { return v.accuracy; });
  r.precision = aggregate_one(per_video, [](const VideoMetrics& v) { return v.precision; });
  r.recall = aggregate_one(per_video, [](const VideoMetrics& v) { return v.recall; });
  r.f1 = aggregate_one(per_video, [](const VideoMetrics& v) { return v.f1; });
  r.jaccard = aggregate_one(per_video, [](const VideoMetrics& v) { return v.jaccard; });
  r.predicted_segments =
      aggregate_one(per_video, [](const VideoMetrics& v) { return static_cast<double>(v.predicted_segments); });
  r.gt_segments =
      aggregate_one(per_video, [](const VideoMetrics& v) { return static_cast<double>(v.gt_segments); });
  return r;
}

bool oracle_check(const std::vector<int>& pred, const std::vector<int>& gt, int num_classes) {
  // Full confusion matrix, enumerated per class over all frames.
  const std::size_t k = static_cast<std::size_t>(num_classes);
  std::vector<std::vector<long>> confusion(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    confusion[static_cast<std::size_t>(gt[i])][static_cast<std::size_t>(pred[i])] += 1;
  }

  long diag = 0;
  for (std::size_t c = 0; c < k; ++c) diag += confusion[c][c];
  const double accuracy = static_cast<double>(diag) / static_cast<double>(pred.size());

  int present = 0;
  double precision_sum = 0.0, recall_sum = 0.0, f1_sum = 0.0, jaccard_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    long tp = confusion[c][c];
    long fn = 0, fp = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fn += confusion[c][o];
      fp += confusion[o][c];
    }
    if (tp + fp + fn == 0) continue;
    ++present;
    const double precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
    const double recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
    precision_sum += precision;
    recall_sum += recall;
    f1_sum += safe_div(2.0 * precision * recall, precision + recall);
    jaccard_sum += safe_div(static_cast<double>(tp), static_cast<double>(tp + fp + fn));
  }

  std::size_t pred_segments = 1, gt_segments = 1;
  for (std::size_t i = 1; i < pred.size(); ++i) {
    if (pred[i] != pred[i - 1]) ++pred_segments;
    if (gt[i] != gt[i - 1]) ++gt_segments;
  }

  const VideoMetrics m = frame_metrics(pred, gt, num_classes);
  return m.accuracy == accuracy && m.precision == precision_sum / present &&
         m.recall == recall_sum / present && m.f1 == f1_sum / present &&
         m.jaccard == jaccard_sum / present && m.predicted_segments == pred_segments &&
         m.gt_segments == gt_segments;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

std::string format_report(const MetricsReport& report) {
  std::ostringstream os;
  os << "# phasekd metrics report v1\n";
  os << "# per-video metrics in percent; segments are counts\n";
  os << "video_id accuracy precision recall f1 jaccard pred_segments gt_segments\n";
  for (const VideoMetrics& v : report.per_video) {
    os << v.video_id << " " << format_percent(v.accuracy) << " " << format_percent(v.precision)
       << " " << format_percent(v.recall) << " " << format_percent(v.f1) << " "
       << format_percent(v.jaccard) << " " << v.predicted_segments << " " << v.gt_segments << "\n";
  }
  auto row = [&os](const char* name, const MetricAggregate& a, bool percent) {
    os << name << " " << (percent ? format_percent(a.mean) : std::to_string(a.mean)) << " +- "
       << (percent ? format_percent(a.std_dev) : std::to_string(a.std_dev)) << "\n";
  };
  os << "# mean +- std over videos\n";
  row("accuracy", report.accuracy, true);
  row("precision", report.precision, true);
  row("recall", report.recall, true);
  row("f1", report.f1, true);
  row("jaccard", report.jaccard, true);
  row("pred_segments", report.predicted_segments, false);
  row("gt_segments", report.gt_segments, false);
  os << "[kv]\n";
  auto kv = [&os](const char* name, const MetricAggregate& a) {
    os << name << "_mean=" << a.mean << "\n" << name << "_std=" << a.std_dev << "\n";
  };
  kv("accuracy", report.accuracy);
  kv("precision", report.precision);
  kv("recall", report.recall);
  kv("f1", report.f1);
  kv("jaccard", report.jaccard);
  kv("pred_segments", report.predicted_segments);
  kv("gt_segments", report.gt_segments);
  os << "n_videos=" << report.per_video.size() << "\n";
  return os.str();
}

}  // namespace phasekd
