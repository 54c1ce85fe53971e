#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "swat/errors.hpp"
#include "swat/predictor.hpp"
#include "swat/simulate.hpp"

using swat::HeadKind;
using swat::TrainConfig;

namespace fs = std::filesystem;

namespace {

swat::Dataset stationary_data(double p, std::size_t n, std::uint64_t seed) {
  swat::BehaviorSampler s({swat::Behavior::Stationary, std::nullopt, {p}, seed});
  swat::Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    swat::Sample x;
    x.id = std::to_string(i);
    x.categorical_ids = {"segment=all"};
    x.target = s.draw_stationary();
    x.raw_target = static_cast<double>(x.target);
    d.samples.push_back(std::move(x));
  }
  return d;
}

// Two segments with different stationary probabilities.
swat::Dataset two_segment_data(std::size_t n, std::uint64_t seed) {
  swat::BehaviorSampler lo({swat::Behavior::Stationary, std::nullopt, {0.5}, seed});
  swat::BehaviorSampler hi({swat::Behavior::Stationary, std::nullopt, {0.9}, seed + 1});
  swat::Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    swat::Sample x;
    x.id = std::to_string(i);
    const bool h = i % 2;
    x.categorical_ids = {h ? "segment=hi" : "segment=lo"};
    x.target = h ? hi.draw_stationary() : lo.draw_stationary();
    x.raw_target = static_cast<double>(x.target);
    d.samples.push_back(std::move(x));
  }
  return d;
}

TrainConfig small_config(HeadKind head) {
  TrainConfig c;
  c.head = head;
  c.features.hash_dim = 64;
  c.hidden = 0;
  c.batch = 256;
  c.optimizer.lr = 0.05;
  c.max_epochs = 30;
  c.tolerance = 1e-6;
  c.seed = 3;
  return c;
}

swat::BucketScheme fig_scheme(bool tail_open) {
  const std::vector<std::int64_t> raw{5, 12, 22};
  return swat::BucketScheme::from_endpoints(raw, tail_open);
}

}  // namespace

TEST(Predictor, InitialLossAtHalf) {
  const auto d = stationary_data(0.8, 500, 1);
  swat::Predictor pred;
  pred.features.hash_dim = 16;
  pred.head = HeadKind::VGeo;
  pred.model = swat::Model(16, 0, 1, 0);
  pred.model.set_params(std::vector<double>(pred.model.num_params(), 0.0));
  double want = 0.0;
  for (const auto& s : d.samples) want += (static_cast<double>(s.target) + 1) * std::log(2.0);
  EXPECT_NEAR(swat::mean_loss(pred, d), want / 500, 1e-12);
  EXPECT_DOUBLE_EQ(pred.predict(d.samples[0]), 1.0);
}

TEST(Predictor, StationaryVGeoRecoversP) {
  const auto d = stationary_data(0.8, 100'000, 11);
  auto c = small_config(HeadKind::VGeo);
  c.batch = 1024;
  const auto r = swat::train(d, c);
  const double p = r.predictor.output(d.samples[0]).probs[0];
  EXPECT_NEAR(p, 0.8, 0.01);
  EXPECT_NEAR(r.predictor.predict(d.samples[0]), 4.0, 0.2);
}

TEST(Predictor, LossTraceSmoke) {
  const auto d = two_segment_data(20'000, 4);
  auto c = small_config(HeadKind::Geo);
  c.scheme = fig_scheme(true);
  c.hidden = 8;
  c.optimizer.lr = 0.003;
  c.max_epochs = 5;
  c.tolerance = -1.0;
  const auto r = swat::train(d, c);
  ASSERT_EQ(r.loss_trace.size(), 6u);
  EXPECT_EQ(r.epochs, 5u);
  for (std::size_t e = 1; e < r.loss_trace.size(); ++e) {
    EXPECT_LE(r.loss_trace[e], r.loss_trace[e - 1]) << "epoch " << e;
  }
  // the model separates the segments
  const double lo = r.predictor.predict(d.samples[0]);
  const double hi = r.predictor.predict(d.samples[1]);
  EXPECT_GT(hi, lo);
}

TEST(Predictor, TrainingIsReproducible) {
  const auto d = two_segment_data(3000, 8);
  auto c = small_config(HeadKind::Binom);
  c.scheme = fig_scheme(false);
  c.hidden = 3;
  c.max_epochs = 4;
  const auto a = swat::train(d, c);
  const auto b = swat::train(d, c);
  EXPECT_EQ(swat::to_json(a.predictor).dump(), swat::to_json(b.predictor).dump());
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  c.seed = 4;
  EXPECT_NE(swat::to_json(swat::train(d, c).predictor).dump(),
            swat::to_json(a.predictor).dump());
}

TEST(Predictor, ClipCountForBinom) {
  auto d = stationary_data(0.9, 1000, 2);
  std::size_t over = 0;
  for (const auto& s : d.samples) over += s.target > 22;
  auto c = small_config(HeadKind::Binom);
  c.scheme = fig_scheme(false);
  c.max_epochs = 2;
  EXPECT_EQ(swat::train(d, c).clipped, over);
}

TEST(Predictor, HeadSchemeConflicts) {
  const auto d = stationary_data(0.5, 10, 0);
  auto c = small_config(HeadKind::Geo);
  EXPECT_THROW(swat::train(d, c), std::invalid_argument);
  c.scheme = fig_scheme(false);
  EXPECT_THROW(swat::train(d, c), std::invalid_argument);
  c.head = HeadKind::Binom;
  c.scheme = fig_scheme(true);
  EXPECT_THROW(swat::train(d, c), std::invalid_argument);
}

TEST(Predictor, NonFiniteLossAborts) {
  auto d = stationary_data(0.5, 100, 0);
  auto c = small_config(HeadKind::WLR);
  c.features.numeric_dims = 1;
  for (auto& s : d.samples) s.numeric = {1.0};
  d.samples[3].numeric = {std::nan("")};
  try {
    swat::train(d, c);
    FAIL() << "expected NumericError";
  } catch (const swat::NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 0"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("parameter norm"), std::string::npos);
  }
}

TEST(Predictor, JsonRoundTrip) {
  const auto d = two_segment_data(500, 1);
  auto c = small_config(HeadKind::Geo);
  c.scheme = fig_scheme(true);
  c.hidden = 2;
  c.max_epochs = 1;
  const auto r = swat::train(d, c);
  const auto dir = fs::temp_directory_path() / "swat_predictor_test";
  fs::create_directories(dir);
  swat::save_predictor(dir / "m.json", r.predictor);
  const auto back = swat::load_predictor(dir / "m.json");
  EXPECT_EQ(swat::to_json(back).dump(), swat::to_json(r.predictor).dump());
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(back.predict(d.samples[i]), r.predictor.predict(d.samples[i]));
  }
}

TEST(Predictor, JsonValidation) {
  const auto d = two_segment_data(100, 1);
  auto c = small_config(HeadKind::VGeo);
  c.max_epochs = 1;
  const auto j = swat::to_json(swat::train(d, c).predictor);
  auto bad = j;
  bad["format_version"] = 99;
  EXPECT_THROW(swat::predictor_from_json(bad), std::invalid_argument);
  bad = j;
  bad["head"] = "binom";
  EXPECT_THROW(swat::predictor_from_json(bad), std::invalid_argument);
  bad = j;
  bad["params"].erase(0);
  EXPECT_THROW(swat::predictor_from_json(bad), std::invalid_argument);
  EXPECT_THROW(swat::load_predictor("/nonexistent/model.json"), swat::InputError);
}

TEST(Predictor, FocusedGeoRecoversReachableBuckets) {
  // every bucket, tail included, sees thousands of watchers
  const std::vector<std::int64_t> raw{20, 40, 60};
  const auto scheme = swat::BucketScheme::from_endpoints(raw, true);
  const std::vector<double> truth{0.97, 0.95, 0.93, 0.9};
  swat::BehaviorSampler s({swat::Behavior::Focused, scheme, truth, 31});
  swat::Dataset d;
  for (int i = 0; i < 100'000; ++i) {
    swat::Sample x;
    x.categorical_ids = {"segment=all"};
    x.target = s.draw_focused();
    d.samples.push_back(std::move(x));
  }
  auto c = small_config(HeadKind::Geo);
  c.scheme = scheme;
  c.batch = 1024;
  c.optimizer.lr = 0.02;
  c.max_epochs = 60;
  c.tolerance = 1e-7;
  const auto probs = swat::train(d, c).predictor.output(d.samples[0]).probs;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    EXPECT_NEAR(probs[k], truth[k], 0.02) << "bucket " << k;
  }
}
