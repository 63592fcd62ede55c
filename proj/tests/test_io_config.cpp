#include <doctest.h>

#include <sstream>

#include "phasekd/config.hpp"
#include "phasekd/io.hpp"
#include "phasekd/params.hpp"
#include "phasekd/rng.hpp"

using namespace phasekd;

TEST_CASE("config defaults round-trip through dump and parse") {
  const RunConfig defaults = default_run_config();
  const std::string text = dump_config(defaults);
  const RunConfig parsed = parse_run_config(text);
  CHECK(dump_config(parsed) == text);

  CHECK(defaults.data.n_videos == 80);
  CHECK(defaults.data.n_phases == 7);
  CHECK(defaults.data.n_train == 40);
  CHECK(defaults.encoder.epochs == 100);
  CHECK(defaults.encoder.batch_size == 64);
  CHECK(defaults.encoder.learning_rate == 1e-2);
  CHECK(defaults.encoder.weight_decay == 1e-5);
  CHECK(defaults.encoder.ema_tau0 == 0.9995);
  CHECK(defaults.encoder.proj_dim == 64);
  CHECK(defaults.decoder.epochs == 30);
  CHECK(defaults.decoder.learning_rate == 1e-3);
  CHECK(defaults.decoder.lambda == 0.3);
  CHECK(defaults.decoder.tmse_tau == 8.0);
}

TEST_CASE("unknown keys and malformed values are hard errors naming the key") {
  CHECK_THROWS_WITH_AS(parse_run_config("[data]\nbogus_key = 3\n"),
                       doctest::Contains("data.bogus_key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("[nonsense]\nseed = 3\n"), doctest::Contains("nonsense"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("[data]\nseed = banana\n"), doctest::Contains("data.seed"),
                       ConfigError);
  CHECK_THROWS_AS(parse_run_config("seed = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[data]\nnot a key value line\n"), ConfigError);
}

TEST_CASE("config validation rejects out-of-range values") {
  CHECK_THROWS_AS(parse_run_config("[decoder]\ntmse_tau = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[decoder]\ntemperature = -2\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[decoder]\nteacher_frame_offset = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[data]\nn_train = 90\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[encoder]\nsimilarity = cosine\n"), ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
  const RunConfig c = parse_run_config(
      "# full-line comment\n\n[data]\n; another comment\nseed = 9\n  n_videos = 10  \nn_train = "
      "5\nduration_mu = 10,20,30,40,50,60,70\n");
  CHECK(c.data.seed == 9);
  CHECK(c.data.n_videos == 10);
}

TEST_CASE("dataset files round-trip bitwise") {
  PhaseModelSpec spec;
  spec.num_phases = 3;
  spec.raw_dim = 5;
  spec.duration_mu = {8, 9, 10};
  spec.confusable_pairs = {{0, 1}};
  PhaseModel model = make_phase_model(spec);
  auto videos = generate_dataset(model, 4, 20, 60, 11);

  std::stringstream buffer;
  save_dataset(buffer, videos);
  auto loaded = load_dataset(buffer);
  REQUIRE(loaded.size() == videos.size());
  for (std::size_t i = 0; i < videos.size(); ++i) {
    CHECK(loaded[i].id == videos[i].id);
    CHECK(loaded[i].labels == videos[i].labels);
    CHECK((loaded[i].frames.array() == videos[i].frames.array()).all());
  }
}

TEST_CASE("feature files round-trip bitwise and join labels by id") {
  std::vector<FeatureVideo> features(2);
  features[0].id = 7;
  features[0].features.setRandom(4, 3);
  features[1].id = 9;
  features[1].features.setRandom(6, 3);

  std::stringstream buffer;
  save_features(buffer, features);
  auto loaded = load_features(buffer);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[1].id == 9);
  CHECK((loaded[0].features.array() == features[0].features.array()).all());
  CHECK((loaded[1].features.array() == features[1].features.array()).all());

  std::vector<VideoSample> dataset(2);
  dataset[0].id = 9;
  dataset[0].labels = std::vector<int>(6, 2);
  dataset[0].frames.setZero(6, 1);
  dataset[1].id = 7;
  dataset[1].labels = std::vector<int>(4, 1);
  dataset[1].frames.setZero(4, 1);
  dataset[1].labeled = false;
  attach_labels(loaded, dataset);
  CHECK(loaded[0].labels == std::vector<int>(4, 1));
  CHECK_FALSE(loaded[0].labeled);
  CHECK(loaded[1].labels == std::vector<int>(6, 2));

  // Length mismatch is structural.
  dataset[0].labels.pop_back();
  CHECK_THROWS_AS(attach_labels(loaded, dataset), StructuralError);
}

TEST_CASE("readers reject bad magic and unsupported versions") {
  std::stringstream garbage("XXXX____");
  CHECK_THROWS_WITH_AS(load_dataset(garbage), doctest::Contains("PKDV"), IoError);

  // Valid magic, future version.
  std::stringstream future;
  future.write("PKDV", 4);
  const std::uint32_t version = 99;
  future.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint32_t count = 0;
  future.write(reinterpret_cast<const char*>(&count), 4);
  CHECK_THROWS_WITH_AS(load_dataset(future), doctest::Contains("version"), IoError);

  std::stringstream weights("PKDWzzzz");
  CHECK_THROWS_AS(ParameterSet::load(weights), IoError);
}

TEST_CASE("prediction files round-trip") {
  PredictionFile predictions;
  predictions.video_ids = {40, 41};
  predictions.labels = {{0, 0, 1, 2}, {3, 3, 3}};

  std::stringstream buffer;
  save_predictions(buffer, predictions);
  CHECK(buffer.str() == "40,0 0 1 2\n41,3 3 3\n");

  PredictionFile loaded = load_predictions(buffer);
  CHECK(loaded.video_ids == predictions.video_ids);
  CHECK(loaded.labels == predictions.labels);

  std::stringstream bad("no comma here\n");
  CHECK_THROWS_AS(load_predictions(bad), IoError);
}
