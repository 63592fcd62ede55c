#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasekd/errors.hpp"

namespace phasekd {

struct VideoMetrics {
  std::uint32_t video_id = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double jaccard = 0.0;
  std::size_t predicted_segments = 0;
  std::size_t gt_segments = 0;
};

struct MetricAggregate {
  double mean = 0.0;
  double std_dev = 0.0;  // population standard deviation
};

struct MetricsReport {
  std::vector<VideoMetrics> per_video;
  MetricAggregate accuracy, precision, recall, f1, jaccard;
  MetricAggregate predicted_segments, gt_segments;
};

/// Frame-wise metrics for one video. Per-class precision/recall/F1/jaccard
/// are computed over the classes present in gt or pred of this video and
/// macro-averaged; classes absent from both are excluded. A zero
/// denominator yields 0 (a gt-present class that is never predicted scores
/// precision 0).
VideoMetrics frame_metrics(const std::vector<int>& pred, const std::vector<int>& gt, int num_classes);

/// Number of maximal constant runs. Rejects empty sequences.
std::size_t segment_count(const std::vector<int>& labels);

/// Per-metric mean and population standard deviation over videos.
MetricsReport aggregate(const std::vector<VideoMetrics>& per_video);

/// Recomputes all metrics through an independent confusion-matrix
/// enumeration and compares with frame_metrics exactly.
bool oracle_check(const std::vector<int>& pred, const std::vector<int>& gt, int num_classes);

/// Human-readable report: header, per-video rows, aggregate row (percent,
/// two decimals), and a machine-readable key=value block.
std::string format_report(const MetricsReport& report);

/// Two-decimal percent formatting used in reports ("91.37").
std::string format_percent(double fraction);

}  // namespace phasekd
