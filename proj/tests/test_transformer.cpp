#include <doctest.h>

#include <cmath>

#include "parkcast/errors.hpp"
#include "parkcast/rng.hpp"
#include "parkcast/transformer.hpp"

using namespace parkcast;

namespace {

WindowSample random_sample(std::int64_t L, std::int64_t C, std::int64_t H,
                           Rng& rng) {
  WindowSample s;
  s.window = static_cast<std::size_t>(L);
  s.channels = static_cast<std::size_t>(C);
  s.target_lot = "L0";
  s.zone_id = "z";
  s.input.resize(L * C);
  for (auto& v : s.input) v = rng.uniform(0.0, 1.0);
  s.input_timestamps.resize(L);
  const Timestamp t0 = *parse_timestamp("2021-09-01T00:00");
  for (std::int64_t i = 0; i < L; ++i) s.input_timestamps[i] = t0 + i * 600;
  s.target.resize(H);
  for (auto& v : s.target) v = rng.uniform(0.0, 1.0);
  return s;
}

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.input_channels = 2;
  cfg.window = 8;
  cfg.horizon = 2;
  cfg.d_model = 8;
  cfg.n_heads = 2;
  cfg.n_layers = 1;
  cfg.d_ff = 16;
  cfg.calendar = {CalendarFeature::kHour};
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("calendar encoding: values, identities, periodicity") {
  const auto features = std::vector<CalendarFeature>{CalendarFeature::kHour};

  // 06:00 is a quarter of the daily period: sin(pi/2) = 1.
  auto enc = calendar_encoding(*parse_timestamp("2021-09-01T06:00"), features);
  REQUIRE(enc.size() == 2);
  CHECK(enc[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(enc[1] == doctest::Approx(0.0).scale(1).epsilon(1e-12));

  const auto all = std::vector<CalendarFeature>{
      CalendarFeature::kHour, CalendarFeature::kDay, CalendarFeature::kWeek,
      CalendarFeature::kMonth};
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Timestamp t = *parse_timestamp("2021-01-01T00:00") +
                        static_cast<Timestamp>(rng.uniform(0.0, 3e7));
    auto e = calendar_encoding(t, all);
    REQUIRE(e.size() == 8);
    for (std::size_t f = 0; f < 4; ++f) {
      const double s = e[2 * f], c = e[2 * f + 1];
      CHECK(std::abs(s * s + c * c - 1.0) < 1e-12);
    }
    // Hour feature repeats after 24 h, weekday after 7 days.
    auto day = calendar_encoding(t + 24 * 3600, all);
    CHECK(std::abs(day[0] - e[0]) < 1e-12);
    CHECK(std::abs(day[1] - e[1]) < 1e-12);
    auto week = calendar_encoding(t + 7 * kSecondsPerDay, all);
    CHECK(std::abs(week[4] - e[4]) < 1e-12);
    CHECK(std::abs(week[5] - e[5]) < 1e-12);
  }

  // Day-of-month repeats across a 31-day month, month-of-year across a
  // common year.
  const Timestamp jan = *parse_timestamp("2021-01-05T09:30");
  auto a = calendar_encoding(jan, all);
  auto b = calendar_encoding(jan + 31 * kSecondsPerDay, all);
  CHECK(std::abs(a[2] - b[2]) < 1e-12);
  CHECK(std::abs(a[3] - b[3]) < 1e-12);
  const Timestamp mar = *parse_timestamp("2021-03-10T12:00");
  auto c1 = calendar_encoding(mar, all);
  auto c2 = calendar_encoding(*parse_timestamp("2022-03-10T12:00"), all);
  CHECK(std::abs(c1[6] - c2[6]) < 1e-12);
  CHECK(std::abs(c1[7] - c2[7]) < 1e-12);
}

TEST_CASE("scaled dot attention: rows sum to one, identical keys average") {
  Rng rng(7);

  SUBCASE("identical keys give the column mean of V") {
    Tensor q = Tensor::from_values({3, 2}, {1, 2, -1, 0, 4, 4});
    Tensor k = Tensor::constant({5, 2}, 0.7);
    Tensor v = Tensor::zeros({5, 3});
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 3; ++j) v.values()[i * 3 + j] = i + 10.0 * j;
    Tensor out = scaled_dot_attention(q, k, v);
    for (int r = 0; r < 3; ++r)
      for (int j = 0; j < 3; ++j)
        CHECK(out.values()[r * 3 + j] ==
              doctest::Approx(2.0 + 10.0 * j).epsilon(1e-9));
  }

  SUBCASE("hand-computed two-key case") {
    Tensor q = Tensor::from_values({1, 1}, {1.0});
    Tensor k = Tensor::from_values({2, 1}, {10.0, -10.0});
    Tensor v = Tensor::from_values({2, 1}, {1.0, 0.0});
    Tensor out = scaled_dot_attention(q, k, v);
    const double w1 = 1.0 / (1.0 + std::exp(-20.0));
    CHECK(out.values()[0] == doctest::Approx(w1).epsilon(1e-12));
  }

  SUBCASE("attention weights are a distribution per row") {
    for (int trial = 0; trial < 20; ++trial) {
      Tensor q = Tensor::zeros({4, 3});
      Tensor k = Tensor::zeros({6, 3});
      for (auto& x : q.values()) x = rng.uniform(-3, 3);
      for (auto& x : k.values()) x = rng.uniform(-3, 3);
      Tensor scores = scale(matmul(q, transpose(k)), 1.0 / std::sqrt(3.0));
      Tensor w = softmax_rows(scores);
      for (int r = 0; r < 4; ++r) {
        double total = 0.0;
        for (int c = 0; c < 6; ++c) {
          const double x = w.values()[r * 6 + c];
          CHECK(x >= 0.0);
          CHECK(x <= 1.0);
          total += x;
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("multi-head attention: single head equals composed attention") {
  Rng rng(13);
  const int L = 5, d = 6;
  Tensor x = Tensor::zeros({L, d});
  for (auto& v : x.values()) v = rng.uniform(-1, 1);

  AttentionParams p;
  auto rand = [&rng](std::vector<std::int64_t> shape) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.values()) v = rng.uniform(-0.5, 0.5);
    return t;
  };
  p.wq = {rand({d, d})};
  p.bq = {rand({d})};
  p.wk = {rand({d, d})};
  p.bk = {rand({d})};
  p.wv = {rand({d, d})};
  p.bv = {rand({d})};
  p.wo = rand({d, d});
  p.bo = rand({d});

  Tensor mha = multi_head_attention(x, p);
  Tensor manual = add_row_bias(
      matmul(scaled_dot_attention(add_row_bias(matmul(x, p.wq[0]), p.bq[0]),
                                  add_row_bias(matmul(x, p.wk[0]), p.bk[0]),
                                  add_row_bias(matmul(x, p.wv[0]), p.bv[0])),
             p.wo),
      p.bo);
  REQUIRE(mha.shape() == manual.shape());
  for (std::int64_t i = 0; i < mha.size(); ++i)
    CHECK(mha.values()[i] == doctest::Approx(manual.values()[i]).epsilon(1e-12));
}

TEST_CASE("multi-head attention: output shape and permutation equivariance") {
  Rng rng(17);
  const int L = 2, d = 8, h = 4;
  AttentionParams p;
  auto rand = [&rng](std::vector<std::int64_t> shape) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.values()) v = rng.uniform(-0.5, 0.5);
    return t;
  };
  for (int i = 0; i < h; ++i) {
    p.wq.push_back(rand({d, d / h}));
    p.bq.push_back(rand({d / h}));
    p.wk.push_back(rand({d, d / h}));
    p.bk.push_back(rand({d / h}));
    p.wv.push_back(rand({d, d / h}));
    p.bv.push_back(rand({d / h}));
  }
  p.wo = rand({d, d});
  p.bo = rand({d});

  Tensor x = rand({L, d});
  Tensor y = multi_head_attention(x, p);
  CHECK(y.shape() == std::vector<std::int64_t>{L, d});

  // Swap the two input rows: outputs swap identically.
  std::vector<double> swapped(x.values());
  for (int j = 0; j < d; ++j) std::swap(swapped[j], swapped[d + j]);
  Tensor xs = Tensor::from_values({L, d}, swapped);
  Tensor ys = multi_head_attention(xs, p);
  for (int j = 0; j < d; ++j) {
    CHECK(ys.values()[j] == doctest::Approx(y.values()[d + j]).epsilon(1e-9));
    CHECK(ys.values()[d + j] == doctest::Approx(y.values()[j]).epsilon(1e-9));
  }
}

TEST_CASE("feed forward: kill switches and position-wise structure") {
  const int L = 3, d = 4, dff = 6;
  Tensor h = Tensor::from_values(
      {L, d}, {1, 2, 3, 4, -1, 0, 1, 2, 0.5, 0.5, 0.5, 0.5});
  Tensor w1_zero = Tensor::zeros({d, dff});
  Tensor b1 = Tensor::zeros({dff});
  Tensor w2 = Tensor::constant({dff, d}, 0.3);
  Tensor b2_zero = Tensor::zeros({d});
  Tensor out = feed_forward(h, w1_zero, b1, w2, b2_zero);
  for (std::int64_t i = 0; i < out.size(); ++i) CHECK(out.values()[i] == 0.0);

  // All-negative pre-activations leave only the output bias.
  Tensor b1_neg = Tensor::constant({dff}, -5.0);
  Tensor w1_tiny = Tensor::constant({d, dff}, 1e-3);
  Tensor b2 = Tensor::from_values({d}, {1, 2, 3, 4});
  Tensor out2 = feed_forward(h, w1_tiny, b1_neg, w2, b2);
  for (int r = 0; r < L; ++r)
    for (int j = 0; j < d; ++j)
      CHECK(out2.values()[r * d + j] == doctest::Approx(b2.values()[j]));

  // Shuffling rows shuffles outputs identically.
  Rng rng(23);
  auto rand = [&rng](std::vector<std::int64_t> shape) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.values()) v = rng.uniform(-1, 1);
    return t;
  };
  Tensor w1 = rand({d, dff}), bb1 = rand({dff}), ww2 = rand({dff, d}), bb2 = rand({d});
  Tensor y = feed_forward(h, w1, bb1, ww2, bb2);
  std::vector<double> reversed;
  for (int r = L - 1; r >= 0; --r)
    for (int j = 0; j < d; ++j) reversed.push_back(h.values()[r * d + j]);
  Tensor yr = feed_forward(Tensor::from_values({L, d}, reversed), w1, bb1, ww2, bb2);
  for (int r = 0; r < L; ++r)
    for (int j = 0; j < d; ++j)
      CHECK(yr.values()[r * d + j] ==
            doctest::Approx(y.values()[(L - 1 - r) * d + j]));
}

TEST_CASE("model forward: shapes, zero-parameter behavior, channel contract") {
  ModelConfig cfg = tiny_config();
  Rng rng(3);
  WindowSample s = random_sample(cfg.window, cfg.input_channels, cfg.horizon, rng);

  TrainedModel model = init_model(cfg);
  Tensor out = model_forward(model, s);
  CHECK(out.shape() == std::vector<std::int64_t>{1, cfg.horizon});

  // Zero every parameter except the head bias: prediction equals the bias.
  for (auto& [name, t] : model.params)
    for (auto& v : t.values()) v = 0.0;
  model.param("head.b").values() = {0.25, -0.75};
  auto pred = predict(model, s);
  CHECK(pred[0] == doctest::Approx(0.25));
  CHECK(pred[1] == doctest::Approx(-0.75));

  // Same sample twice gives identical outputs.
  TrainedModel m2 = init_model(cfg);
  auto p1 = predict(m2, s);
  auto p2 = predict(m2, s);
  CHECK(p1 == p2);

  WindowSample bad = random_sample(cfg.window, cfg.input_channels + 1, cfg.horizon, rng);
  CHECK_THROWS_AS(model_forward(model, bad), ConfigError);
}

TEST_CASE("full-model gradients match central finite differences") {
  ModelConfig cfg = tiny_config();
  Rng rng(41);
  WindowSample s = random_sample(cfg.window, cfg.input_channels, cfg.horizon, rng);
  TrainedModel model = init_model(cfg);
  Tensor target = Tensor::from_values({1, cfg.horizon}, s.target);

  Tensor loss = mse_loss(model_forward(model, s), target);
  loss.backward();

  const double delta = 1e-4;
  std::size_t checked = 0;
  for (auto& [name, param] : model.params) {
    const std::vector<double> analytic = param.grad();
    for (std::size_t i = 0; i < param.values().size(); ++i) {
      NoGradGuard guard;
      const double keep = param.values()[i];
      param.values()[i] = keep + delta;
      const double up = mse_loss(model_forward(model, s), target).item();
      param.values()[i] = keep - delta;
      const double down = mse_loss(model_forward(model, s), target).item();
      param.values()[i] = keep;
      const double numeric = (up - down) / (2.0 * delta);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-7});
      CHECK(std::abs(analytic[i] - numeric) / denom < 1e-4);
      ++checked;
    }
  }
  CHECK(checked == static_cast<std::size_t>(666));  // full tiny-model tally
}

TEST_CASE("adam optimizer behavior") {
  SUBCASE("zero gradient leaves parameters untouched") {
    Tensor w = Tensor::from_values({3}, {1.0, -2.0, 0.5}, true);
    AdamOptimizer opt({w}, 0.1);
    w.grad();  // allocate zeros
    opt.step();
    CHECK(w.values() == std::vector<double>{1.0, -2.0, 0.5});
  }

  SUBCASE("first step moves by about -lr * sign(gradient)") {
    Tensor w = Tensor::from_values({2}, {0.0, 0.0}, true);
    AdamOptimizer opt({w}, 0.1);
    w.grad() = {0.5, -3.0};
    opt.step();
    CHECK(w.values()[0] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(w.values()[1] == doctest::Approx(0.1).epsilon(1e-6));
  }

  SUBCASE("converges on a scalar quadratic") {
    Tensor w = Tensor::from_values({1}, {0.0}, true);
    AdamOptimizer opt({w}, 0.1);
    for (int step = 0; step < 200; ++step) {
      w.zero_grad();
      Tensor diff = sub(w, Tensor::constant({1}, 3.0));
      Tensor loss = mul(diff, diff);
      loss.backward();
      opt.step();
    }
    CHECK(std::abs(w.values()[0] - 3.0) < 0.05);
  }
}

TEST_CASE("training: convergence on constant targets and determinism") {
  ModelConfig cfg = tiny_config();
  Rng rng(9);
  std::vector<WindowSample> dataset;
  for (int i = 0; i < 12; ++i) {
    WindowSample s = random_sample(cfg.window, cfg.input_channels, cfg.horizon, rng);
    s.target = {0.4, 0.4};
    dataset.push_back(std::move(s));
  }
  TrainOptions opts;
  opts.epochs = 50;
  opts.batch_size = 4;
  opts.learning_rate = 5e-3;
  opts.seed = 2;

  TrainedModel model = train(dataset, cfg, opts);
  REQUIRE(model.train_loss_curve.size() == 50);
  CHECK(model.train_loss_curve.back() < 1e-3);

  TrainedModel again = train(dataset, cfg, opts);
  CHECK(model.train_loss_curve == again.train_loss_curve);  // bit-identical
  for (const auto& [name, t] : model.params)
    CHECK(t.values() == again.param(name).values());
}

TEST_CASE("training loss decreases on periodic data") {
  ModelConfig cfg = tiny_config();
  cfg.window = 24;
  cfg.horizon = 4;
  Rng rng(31);
  std::vector<WindowSample> dataset;
  const Timestamp t0 = *parse_timestamp("2021-09-01T00:00");
  for (int i = 0; i < 40; ++i) {
    WindowSample s;
    s.window = cfg.window;
    s.channels = cfg.input_channels;
    s.target_lot = "L0";
    const int offset = i * 7;
    s.input.resize(cfg.window * cfg.input_channels);
    s.input_timestamps.resize(cfg.window);
    for (std::int64_t j = 0; j < cfg.window; ++j) {
      const double phase = 2.0 * M_PI * (offset + j) / 24.0;
      s.input[j * 2] = 0.5 + 0.3 * std::sin(phase);
      s.input[j * 2 + 1] = 0.5 + 0.3 * std::cos(phase);
      s.input_timestamps[j] = t0 + (offset + j) * 600;
    }
    s.target.resize(cfg.horizon);
    for (std::int64_t hh = 0; hh < cfg.horizon; ++hh) {
      const double phase = 2.0 * M_PI * (offset + cfg.window + hh) / 24.0;
      s.target[hh] = 0.5 + 0.3 * std::sin(phase);
    }
    dataset.push_back(std::move(s));
  }
  TrainOptions opts;
  opts.epochs = 20;
  opts.batch_size = 8;
  opts.learning_rate = 3e-3;
  opts.seed = 4;
  TrainedModel model = train(dataset, cfg, opts);
  CHECK(model.train_loss_curve[19] < model.train_loss_curve[0]);
}

TEST_CASE("train rejects an empty dataset") {
  ModelConfig cfg = tiny_config();
  CHECK_THROWS_AS(train({}, cfg, TrainOptions{}), DataError);
}

TEST_CASE("model serialization round-trips exactly") {
  ModelConfig cfg = tiny_config();
  TrainedModel model = init_model(cfg);
  model.train_loss_curve = {0.5, 0.25, 0.125};
  const std::string text = model_to_json(model, "{\"seed\":1}");
  TrainedModel loaded = model_from_json(text);
  CHECK(loaded.config.d_model == cfg.d_model);
  CHECK(loaded.config.calendar == cfg.calendar);
  CHECK(loaded.train_loss_curve == model.train_loss_curve);
  REQUIRE(loaded.params.size() == model.params.size());
  for (const auto& [name, t] : model.params) {
    CHECK(loaded.param(name).values() == t.values());  // bit-exact via JSON
    CHECK(loaded.param(name).shape() == t.shape());
  }

  Rng rng(77);
  WindowSample s = random_sample(cfg.window, cfg.input_channels, cfg.horizon, rng);
  CHECK(predict(model, s) == predict(loaded, s));
}

TEST_CASE("dropout flag keeps training deterministic and distinct") {
  ModelConfig cfg = tiny_config();
  cfg.dropout = 0.2;
  Rng rng(51);
  std::vector<WindowSample> dataset;
  for (int i = 0; i < 8; ++i)
    dataset.push_back(random_sample(cfg.window, cfg.input_channels, cfg.horizon, rng));
  TrainOptions opts;
  opts.epochs = 3;
  opts.batch_size = 4;
  opts.seed = 6;
  TrainedModel a = train(dataset, cfg, opts);
  TrainedModel b = train(dataset, cfg, opts);
  CHECK(a.train_loss_curve == b.train_loss_curve);

  ModelConfig no_drop = cfg;
  no_drop.dropout = 0.0;
  TrainedModel c = train(dataset, no_drop, opts);
  CHECK(a.train_loss_curve != c.train_loss_curve);
}
