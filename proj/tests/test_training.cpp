#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "nhgcn/dataset.hpp"
#include "nhgcn/error.hpp"
#include "nhgcn/training.hpp"
#include "oracles.hpp"

using namespace nhg;

namespace {

Dataset toy(std::uint64_t seed = 1) {
  SynthSpec s;
  s.sizes = {40, 40, 40};
  s.p_in = 0.12;
  s.p_out = 0.02;
  s.num_features = 6;
  s.mean_scale = 1.0;
  s.sigma = 1.0;
  s.seed = seed;
  return generate(s);
}

ModelConfig model_for(const Dataset& d, Arch arch = Arch::kNhgcn) {
  ModelConfig m;
  m.arch = arch;
  m.in_features = d.num_features();
  m.num_classes = d.num_classes();
  m.hidden = 16;
  m.share_weights = arch == Arch::kNhgcnSs;
  return m;
}

TrainConfig train_cfg(std::size_t epochs = 60, std::size_t patience = 20) {
  TrainConfig t;
  t.max_epochs = epochs;
  t.patience = patience;
  t.seed = 3;
  return t;
}

}  // namespace

TEST(Split, SizesAndDisjointness) {
  const LabelVec l{std::vector<std::uint32_t>(10, 0), 2};
  const Split s = make_split(10, l, 0, {});
  EXPECT_EQ(s.train.size(), 6u);
  EXPECT_EQ(s.val.size(), 2u);
  EXPECT_EQ(s.test.size(), 2u);
  std::set<NodeId> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 10u);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
}

TEST(Split, DeterministicPerSeedAndVariesAcrossSeeds) {
  const LabelVec l{std::vector<std::uint32_t>(1000, 1), 2};
  const Split a = make_split(1000, l, 4, {});
  const Split b = make_split(1000, l, 4, {});
  const Split c = make_split(1000, l, 5, {});
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
  EXPECT_EQ(a.train.size(), 600u);
  EXPECT_EQ(a.val.size(), 200u);
}

TEST(Split, Rejections) {
  const LabelVec l{std::vector<std::uint32_t>(4, 0), 2};
  EXPECT_THROW(make_split(4, l, 0, {}), InputError);
  const LabelVec m{std::vector<std::uint32_t>(10, 0), 2};
  EXPECT_THROW(make_split(10, m, 0, {1.0, 0.0, 0.0}), InputError);
}

TEST(TrainConfigValidate, RejectsBadValues) {
  TrainConfig t;
  t.lr = 0;
  EXPECT_THROW(t.validate(), ConfigError);
  t = TrainConfig{};
  t.patience = t.max_epochs + 1;
  EXPECT_THROW(t.validate(), ConfigError);
  t = TrainConfig{};
  t.ratios = {0.5, 0.5, 0.5};
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(TrainRun, AlternatingScheduleInvariants) {
  const Dataset d = toy();
  const Split split = make_split(d.num_nodes(), d.labels, 3, {});
  const ModelConfig m = model_for(d);
  std::vector<MaskPair> seen;
  const RunResult r = train_run(d.graph, d.features, d.labels, split, m, train_cfg(),
                                [&](std::size_t, const MaskPair& masks, const Prediction&) { seen.push_back(masks); });
  ASSERT_EQ(seen.size(), r.log.size());

  // epoch 1 runs with NH = 1 everywhere, so every node is high
  EXPECT_EQ(seen[0].low, DiagMask(d.num_nodes(), 0));
  EXPECT_EQ(seen[0].high, DiagMask(d.num_nodes(), 1));

  double best = 0.0;
  std::size_t updates = 0;
  for (std::size_t e = 0; e < r.log.size(); ++e) {
    const bool improved = r.log[e].acc_val > best;
    EXPECT_EQ(r.log[e].nh_updated, improved) << "epoch " << e + 1;
    if (improved) {
      best = r.log[e].acc_val;
      ++updates;
    }
    // masks change only in the epoch right after an update
    if (e > 0 && !r.log[e - 1].nh_updated) {
      EXPECT_EQ(seen[e].low, seen[e - 1].low) << "epoch " << e + 1;
    }
  }
  EXPECT_EQ(updates, r.nh_history.size());
  for (std::size_t i = 1; i < r.best_val_history.size(); ++i) {
    EXPECT_GT(r.best_val_history[i], r.best_val_history[i - 1]);
  }
  EXPECT_EQ(r.best_val, best);
  EXPECT_EQ(r.test_acc, r.log[r.best_epoch - 1].acc_test);
}

TEST(TrainRun, StopsPatienceEpochsAfterLastImprovement) {
  const Dataset d = toy();
  const Split split = make_split(d.num_nodes(), d.labels, 3, {});
  TrainConfig t = train_cfg(1000, 100);
  t.lr = 1e-12;  // predictions never move, so only epoch 1 improves
  const RunResult r = train_run(d.graph, d.features, d.labels, split, model_for(d, Arch::kGcn), t);
  ASSERT_GT(r.log[0].acc_val, 0.0);
  EXPECT_EQ(r.best_epoch, 1u);
  EXPECT_EQ(r.log.size(), 101u);
}

TEST(TrainRun, StopsAtLastImprovementPlusPatienceInGeneral) {
  const Dataset d = toy(2);
  const Split split = make_split(d.num_nodes(), d.labels, 1, {});
  const RunResult r = train_run(d.graph, d.features, d.labels, split, model_for(d), train_cfg(400, 15));
  if (r.log.size() < 400) EXPECT_EQ(r.log.size(), r.best_epoch + 15);
}

TEST(TrainRun, BitwiseReproducible) {
  const Dataset d = toy();
  const Split split = make_split(d.num_nodes(), d.labels, 3, {});
  for (Arch a : {Arch::kNhgcn, Arch::kNhgcnSs, Arch::kGcn, Arch::kMlp, Arch::kGcnPlusX}) {
    const ModelConfig m = model_for(d, a);
    const RunResult x = train_run(d.graph, d.features, d.labels, split, m, train_cfg(30, 30));
    const RunResult y = train_run(d.graph, d.features, d.labels, split, m, train_cfg(30, 30));
    ASSERT_EQ(x.log.size(), y.log.size());
    for (std::size_t e = 0; e < x.log.size(); ++e) {
      EXPECT_EQ(x.log[e].loss, y.log[e].loss);
      EXPECT_EQ(x.log[e].alpha, y.log[e].alpha);
    }
    EXPECT_EQ(x.best_params, y.best_params);
    EXPECT_EQ(x.test_acc, y.test_acc);
  }
}

TEST(TrainRun, TestLabelsNeverInfluenceTraining) {
  const Dataset d = toy();
  const Split split = make_split(d.num_nodes(), d.labels, 3, {});
  LabelVec shuffled = d.labels;
  for (NodeId i : split.test) shuffled.y[i] = (shuffled.y[i] + 1) % shuffled.num_classes;
  for (NhLabelSource src : {NhLabelSource::kPredictedAll, NhLabelSource::kTrainTruthPlusPredicted}) {
    TrainConfig t = train_cfg(40, 40);
    t.nh_label_source = src;
    const ModelConfig m = model_for(d);
    const RunResult a = train_run(d.graph, d.features, d.labels, split, m, t);
    const RunResult b = train_run(d.graph, d.features, shuffled, split, m, t);
    ASSERT_EQ(a.log.size(), b.log.size());
    for (std::size_t e = 0; e < a.log.size(); ++e) {
      EXPECT_EQ(a.log[e].loss, b.log[e].loss);
      EXPECT_EQ(a.log[e].acc_val, b.log[e].acc_val);
      EXPECT_EQ(a.log[e].nh_updated, b.log[e].nh_updated);
    }
    EXPECT_EQ(a.final_nh.values, b.final_nh.values);
    EXPECT_EQ(a.best_params, b.best_params);
  }
}

TEST(TrainRun, SmokeOnPlantedToy) {
  const Dataset d = toy();
  const Split split = make_split(d.num_nodes(), d.labels, 0, {});
  ModelConfig m = model_for(d);
  m.hop = 1;
  m.inv_threshold = 2.0;
  m.combiner = Combiner::kAdd;
  const RunResult r = train_run(d.graph, d.features, d.labels, split, m, train_cfg(500, 100));
  EXPECT_LE(r.log.size(), 500u);
  for (const EpochLog& e : r.log) EXPECT_TRUE(std::isfinite(e.loss));
  EXPECT_GT(r.test_acc, 1.0 / 3.0);
  EXPECT_EQ(r.best_masks.low.size(), d.num_nodes());
}

TEST(TrainRun, ShapeErrors) {
  const Dataset d = toy();
  const Split split = make_split(d.num_nodes(), d.labels, 0, {});
  ModelConfig m = model_for(d);
  m.num_classes = 4;
  EXPECT_THROW(train_run(d.graph, d.features, d.labels, split, m, train_cfg()), ShapeError);
  m = model_for(d);
  EXPECT_THROW(train_run(d.graph, Tensor(3, d.num_features()), d.labels, split, m, train_cfg()), ShapeError);
}

TEST(MeanStd, KnownValuesAndOrderInvariance) {
  auto [m, s] = mean_and_sample_std({0.8, 0.9});
  EXPECT_NEAR(m, 0.85, 1e-15);
  EXPECT_NEAR(s, std::sqrt(0.005), 1e-15);
  auto [m2, s2] = mean_and_sample_std({0.7, 0.7, 0.7});
  EXPECT_EQ(s2, 0.0);
  EXPECT_NEAR(m2, 0.7, 1e-15);
  std::mt19937_64 gen(1);
  std::vector<double> v(17);
  for (double& x : v) x = std::uniform_real_distribution<double>()(gen);
  const auto ref = mean_and_sample_std(v);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(v.begin(), v.end(), gen);
    EXPECT_EQ(mean_and_sample_std(v), ref);
  }
}

TEST(MultiSeed, SeedOrderAndThreadsDoNotMatter) {
  const Dataset d = toy();
  const ModelConfig m = model_for(d, Arch::kGcn);
  const TrainConfig t = train_cfg(20, 20);
  const std::vector<std::uint64_t> s1{0, 1, 2}, s2{2, 0, 1};
  const MultiSeedResult a = multi_seed(d.graph, d.features, d.labels, m, t, s1, 1);
  const MultiSeedResult b = multi_seed(d.graph, d.features, d.labels, m, t, s2, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stddev, b.stddev);
  EXPECT_EQ(a.excluded, 0u);
  EXPECT_EQ(a.runs[0].test_acc, b.runs[1].test_acc);
}

TEST(MultiSeed, NeedsTwoSeeds) {
  const Dataset d = toy();
  const std::vector<std::uint64_t> one{0};
  EXPECT_THROW(multi_seed(d.graph, d.features, d.labels, model_for(d), train_cfg(), one), InputError);
}

TEST(MultiSeed, DivergedSeedsAreExcluded) {
  Dataset d = toy();
  for (double& v : d.features.data) v = 1e308;  // projections overflow, logits turn NaN
  const std::vector<std::uint64_t> seeds{0, 1};
  const MultiSeedResult r = multi_seed(d.graph, d.features, d.labels, model_for(d, Arch::kMlp), train_cfg(5, 5), seeds);
  EXPECT_EQ(r.excluded, 2u);
  EXPECT_FALSE(r.runs[0].ok);
  EXPECT_FALSE(r.runs[0].error.empty());
}
