#include <doctest.h>

#include <algorithm>

#include "phasekd/metrics.hpp"
#include "phasekd/rng.hpp"

using namespace phasekd;

TEST_CASE("perfect prediction scores all ones") {
  std::vector<int> labels = {0, 0, 1, 2, 2, 2, 4};
  VideoMetrics m = frame_metrics(labels, labels, 5);
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
  CHECK(m.jaccard == 1.0);
  CHECK(m.predicted_segments == m.gt_segments);
}

TEST_CASE("hand-computed 4-frame case") {
  std::vector<int> gt = {0, 0, 1, 1};
  std::vector<int> pred = {0, 1, 1, 1};
  VideoMetrics m = frame_metrics(pred, gt, 2);
  CHECK(m.accuracy == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.precision == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(m.recall == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.jaccard == doctest::Approx(7.0 / 12.0).epsilon(1e-15));
  // class0 f1 = 2/3, class1 f1 = 4/5 -> macro 11/15
  CHECK(m.f1 == doctest::Approx(11.0 / 15.0).epsilon(1e-15));
  CHECK(m.predicted_segments == 2);
  CHECK(m.gt_segments == 2);
}

TEST_CASE("all-wrong single-class prediction") {
  std::vector<int> gt = {1, 1, 1};
  std::vector<int> pred = {2, 2, 2};
  VideoMetrics m = frame_metrics(pred, gt, 3);
  CHECK(m.accuracy == 0.0);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.jaccard == 0.0);
}

TEST_CASE("frame_metrics validates its inputs") {
  CHECK_THROWS_AS(frame_metrics({0, 1}, {0}, 2), ShapeError);
  CHECK_THROWS_AS(frame_metrics({}, {}, 2), SequenceLengthError);
  CHECK_THROWS_AS(frame_metrics({5}, {0}, 2), LabelError);
}

TEST_CASE("segment counting") {
  CHECK(segment_count({0, 0, 0}) == 1);
  CHECK(segment_count({0, 1, 0, 1}) == 4);
  CHECK(segment_count({7}) == 1);
  CHECK_THROWS_AS(segment_count({}), SequenceLengthError);
}

TEST_CASE("aggregate mean and population std") {
  VideoMetrics a;
  a.accuracy = 0.8;
  VideoMetrics b;
  b.accuracy = 1.0;
  MetricsReport r = aggregate({a, b});
  CHECK(r.accuracy.mean == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(r.accuracy.std_dev == doctest::Approx(0.1).epsilon(1e-15));

  MetricsReport single = aggregate({a});
  CHECK(single.accuracy.std_dev == 0.0);

  MetricsReport swapped = aggregate({b, a});
  CHECK(swapped.accuracy.mean == r.accuracy.mean);
  CHECK(swapped.accuracy.std_dev == r.accuracy.std_dev);

  CHECK_THROWS_AS(aggregate({}), ParamError);
}

TEST_CASE("metrics equal the brute-force oracle on random cases") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const int classes = 2 + static_cast<int>(rng.index(6));
    const std::size_t length = 1 + rng.index(50);
    std::vector<int> pred(length), gt(length);
    for (std::size_t i = 0; i < length; ++i) {
      pred[i] = static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
      gt[i] = static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
    }
    CHECK(oracle_check(pred, gt, classes));
  }
  CHECK(oracle_check({0, 1, 1, 1}, {0, 0, 1, 1}, 2));
  CHECK(oracle_check({1}, {1}, 3));
}

TEST_CASE("accuracy is invariant under bijective relabeling") {
  Rng rng(7);
  std::vector<int> perm = {2, 0, 3, 1};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t length = 1 + rng.index(40);
    std::vector<int> pred(length), gt(length);
    for (std::size_t i = 0; i < length; ++i) {
      pred[i] = static_cast<int>(rng.index(4));
      gt[i] = static_cast<int>(rng.index(4));
    }
    std::vector<int> pred2(length), gt2(length);
    for (std::size_t i = 0; i < length; ++i) {
      pred2[i] = perm[static_cast<std::size_t>(pred[i])];
      gt2[i] = perm[static_cast<std::size_t>(gt[i])];
    }
    CHECK(frame_metrics(pred, gt, 4).accuracy == frame_metrics(pred2, gt2, 4).accuracy);
  }
}

TEST_CASE("per-class jaccard never exceeds precision or recall") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 3;
    const std::size_t length = 1 + rng.index(30);
    std::vector<int> pred(length), gt(length);
    for (std::size_t i = 0; i < length; ++i) {
      pred[i] = static_cast<int>(rng.index(3));
      gt[i] = static_cast<int>(rng.index(3));
    }
    for (int c = 0; c < classes; ++c) {
      long tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < length; ++i) {
        if (pred[i] == c && gt[i] == c) ++tp;
        if (pred[i] == c && gt[i] != c) ++fp;
        if (pred[i] != c && gt[i] == c) ++fn;
      }
      if (tp + fp + fn == 0) continue;
      const double p = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
      const double r = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
      const double j = double(tp) / double(tp + fp + fn);
      CHECK(j <= std::min(p, r) + 1e-15);
    }
  }
}

TEST_CASE("report formatting carries all five metrics plus segments") {
  VideoMetrics v;
  v.video_id = 3;
  v.accuracy = 0.9137;
  v.precision = 0.8641;
  v.recall = 0.8409;
  v.f1 = 0.8409;
  v.jaccard = 0.7604;
  v.predicted_segments = 9;
  v.gt_segments = 7;
  const std::string text = format_report(aggregate({v}));
  CHECK(text.find("accuracy 91.37") != std::string::npos);
  CHECK(text.find("precision 86.41") != std::string::npos);
  CHECK(text.find("recall 84.09") != std::string::npos);
  CHECK(text.find("f1 84.09") != std::string::npos);
  CHECK(text.find("jaccard 76.04") != std::string::npos);
  CHECK(text.find("pred_segments") != std::string::npos);
  CHECK(text.find("accuracy_mean=") != std::string::npos);
}
