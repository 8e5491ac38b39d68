#include <doctest.h>

#include "parkcast/errors.hpp"
#include "parkcast/experiment.hpp"

using namespace parkcast;

TEST_CASE("config parsing: comments, whitespace, dotted keys") {
  ConfigMap map = parse_config_text(
      "# experiment\n"
      "seed = 7\n"
      "\n"
      "synth.n_lots = 24   # desk scale\n"
      "prep.window=96\n"
      "model.calendar = hour,week\n"
      "eval.horizons = 1, 6, 12\n");
  ExperimentConfig c = config_from_map(map);
  CHECK(c.seed == 7);
  CHECK(c.synth.n_lots == 24);
  CHECK(c.pipeline.window == 96);
  CHECK(c.calendar == "hour,week");
  CHECK(c.horizons == std::vector<std::size_t>{1, 6, 12});

  // The master seed flows into stage seeds unless overridden.
  CHECK(c.synth.seed == 7);
  CHECK(c.pipeline.seed == 7);
}

TEST_CASE("unknown keys and malformed lines fail loudly") {
  CHECK_THROWS_AS(config_from_map(parse_config_text("modle.d_model = 8\n")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("just some words\n"), ConfigError);
  CHECK_THROWS_AS(config_from_map(parse_config_text("train.epochs = soon\n")),
                  ConfigError);
}

TEST_CASE("overrides replace file values") {
  ConfigMap map = parse_config_text("seed = 1\ntrain.epochs = 5\n");
  apply_overrides(map, {"train.epochs=9", "model.d_model = 16"});
  ExperimentConfig c = config_from_map(map);
  CHECK(c.epochs == 9);
  CHECK(c.d_model == 16);
  CHECK_THROWS_AS(apply_overrides(map, {"no-equals-sign"}), ConfigError);
}

TEST_CASE("config hash is stable and sensitive") {
  ExperimentConfig a = config_from_map(parse_config_text("seed = 1\n"));
  ExperimentConfig b = config_from_map(parse_config_text("seed = 1\n"));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);

  ExperimentConfig c = config_from_map(parse_config_text("seed = 2\n"));
  CHECK(config_hash(a) != config_hash(c));

  ExperimentConfig d = config_from_map(
      parse_config_text("seed = 1\nmodel.d_model = 32\n"));
  CHECK(config_hash(a) != config_hash(d));

  // The output directory is presentation, not content.
  ExperimentConfig e = config_from_map(parse_config_text("seed = 1\nout = elsewhere\n"));
  CHECK(config_hash(a) == config_hash(e));
}

TEST_CASE("provenance embeds hash, seed, and version") {
  ExperimentConfig c = config_from_map(parse_config_text("seed = 3\n"));
  const std::string p = provenance_json(c);
  CHECK(p.find(config_hash(c)) != std::string::npos);
  CHECK(p.find("\"seed\":3") != std::string::npos);
  CHECK(p.find(kToolVersion) != std::string::npos);
}

TEST_CASE("typed views derive model and training options") {
  ExperimentConfig c = config_from_map(parse_config_text(
      "seed = 4\nprep.window = 48\nprep.horizon = 6\nmodel.d_model = 16\n"
      "model.n_heads = 2\ntrain.epochs = 2\ntrain.lr = 0.01\n"));
  ModelConfig mc = c.model_config();
  CHECK(mc.window == 48);
  CHECK(mc.horizon == 6);
  CHECK(mc.d_model == 16);
  CHECK(mc.n_heads == 2);
  CHECK(mc.seed == 4);
  TrainOptions to = c.train_options();
  CHECK(to.epochs == 2);
  CHECK(to.learning_rate == doctest::Approx(0.01));
  CHECK(to.seed == 4);
}
