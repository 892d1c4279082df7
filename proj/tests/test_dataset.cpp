#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nhgcn/checkpoint.hpp"
#include "nhgcn/dataset.hpp"
#include "nhgcn/export.hpp"
#include "nhgcn/metrics.hpp"
#include "nhgcn/model.hpp"

using namespace nhg;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nhg_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void put(const std::string& file, const std::string& text) const {
    std::ofstream(dir_ / file) << text;
  }
  std::string slurp(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  void write_toy() const {
    put("meta.tsv", "name\ttoy\nn\t3\nf\t2\nC\t2\n");
    put("edges.tsv", "# u v\n0\t1\n1\t2\n");
    put("features.tsv", "0\t1.0 0.0\n1\t0.5 0.5\n2\t0.0 1.0\n");
    put("labels.tsv", "0\t0\n1\t0\n2\t1\n");
  }

  fs::path dir_;
};

DatasetErrorKind load_error_kind(const fs::path& dir, std::size_t* line = nullptr) {
  try {
    load_dataset(dir);
  } catch (const DatasetError& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  ADD_FAILURE() << "load_dataset did not throw";
  return DatasetErrorKind::kInconsistent;
}

}  // namespace

using DatasetIo = TempDir;

TEST_F(DatasetIo, LoadsToyDirectory) {
  write_toy();
  const Dataset d = load_dataset(dir_);
  EXPECT_EQ(d.name, "toy");
  EXPECT_EQ(d.num_nodes(), 3u);
  EXPECT_EQ(d.graph.num_edges(), 2u);
  EXPECT_EQ(d.num_features(), 2u);
  EXPECT_EQ(d.labels.y, (std::vector<std::uint32_t>{0, 0, 1}));
  EXPECT_EQ(d.features(1, 1), 0.5);
}

TEST_F(DatasetIo, ClassIdOutOfRangeNamesLine) {
  write_toy();
  put("labels.tsv", "0\t0\n1\t2\n2\t1\n");
  std::size_t line = 0;
  EXPECT_EQ(load_error_kind(dir_, &line), DatasetErrorKind::kOutOfRange);
  EXPECT_EQ(line, 2u);
}

TEST_F(DatasetIo, DuplicateEdgesStoredOnce) {
  write_toy();
  put("edges.tsv", "0\t1\n1\t0\n0\t1\n1\t2\n");
  EXPECT_EQ(load_dataset(dir_).graph.num_edges(), 2u);
}

TEST_F(DatasetIo, ErrorKinds) {
  EXPECT_EQ(load_error_kind(dir_), DatasetErrorKind::kMissingFile);
  write_toy();
  put("features.tsv", "0\t1.0 x\n1\t0.5 0.5\n2\t0.0 1.0\n");
  EXPECT_EQ(load_error_kind(dir_), DatasetErrorKind::kNonNumeric);
  write_toy();
  put("features.tsv", "0\t1.0\n1\t0.5 0.5\n2\t0.0 1.0\n");
  EXPECT_EQ(load_error_kind(dir_), DatasetErrorKind::kInconsistent);
  write_toy();
  put("labels.tsv", "0\t0\n1\t0\n");
  EXPECT_EQ(load_error_kind(dir_), DatasetErrorKind::kInconsistent);
  write_toy();
  put("edges.tsv", "0\t3\n");
  EXPECT_EQ(load_error_kind(dir_), DatasetErrorKind::kOutOfRange);
}

TEST_F(DatasetIo, SaveLoadRoundTripIsBitwise) {
  SynthSpec s;
  s.sizes = {10, 12};
  s.p_in = 0.3;
  s.p_out = 0.05;
  s.seed = 4;
  const Dataset d = generate(s);
  save_dataset(d, dir_ / "ds");
  const Dataset e = load_dataset(dir_ / "ds");
  EXPECT_EQ(d.features, e.features);
  EXPECT_EQ(d.labels.y, e.labels.y);
  EXPECT_EQ(d.graph.num_edges(), e.graph.num_edges());
  for (NodeId i = 0; i < d.num_nodes(); ++i) {
    const auto a = d.graph.neighbors(i), b = e.graph.neighbors(i);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
}

TEST(Synth, CompleteBipartiteHasZeroHomophily) {
  SynthSpec s;
  s.kind = SynthKind::kBipartite;
  s.sizes = {4, 4};
  s.p_out = 1.0;
  const Dataset d = generate(s);
  EXPECT_EQ(d.graph.num_edges(), 16u);
  EXPECT_EQ(node_homophily(d.graph, d.labels).graph_level, 0.0);
  const NhVector nh = nh_values(khop_index(d.graph, 1), d.labels);
  for (double v : nh.values) EXPECT_EQ(v, 1.0);
}

TEST(Synth, NoCrossEdgesGivesMonochromaticComponents) {
  SynthSpec s;
  s.sizes = {15, 15, 15};
  s.p_in = 0.3;
  s.p_out = 0.0;
  const Dataset d = generate(s);
  for (NodeId i = 0; i < d.num_nodes(); ++i) {
    for (NodeId j : d.graph.neighbors(i)) EXPECT_EQ(d.labels.y[i], d.labels.y[j]);
  }
}

TEST(Synth, SameSeedSameGraph) {
  SynthSpec s;
  s.sizes = {20, 20};
  s.p_in = 0.2;
  s.p_out = 0.1;
  s.hubs = 3;
  s.hub_degree = 5;
  s.seed = 9;
  const Dataset a = generate(s), b = generate(s);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels.y, b.labels.y);
  EXPECT_EQ(a.graph.num_edges(), b.graph.num_edges());
  EXPECT_EQ(a.num_nodes(), 43u);
  s.seed = 10;
  EXPECT_NE(generate(s).features, a.features);
}

TEST(Synth, PlantedPartitionIsHomophilous) {
  SynthSpec s;
  s.sizes = {125, 125, 125, 125};
  s.p_in = 0.05;
  s.p_out = 0.005;
  const Dataset d = generate(s);
  EXPECT_GT(node_homophily(d.graph, d.labels).graph_level, 0.5);
}

TEST(Synth, InvalidSpecs) {
  SynthSpec s;
  s.kind = SynthKind::kBipartite;
  s.sizes = {3};
  EXPECT_THROW(generate(s), InputError);
  s.kind = SynthKind::kPlantedPartition;
  s.sizes = {3, 3};
  s.p_in = 1.5;
  EXPECT_THROW(generate(s), InputError);
}

using Exports = TempDir;

TEST_F(Exports, MetricDumpRowsAndReexportIsIdentical) {
  const Graph g = build_graph(std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}}, 3);
  const LabelVec l{{0, 0, 1}, 2};
  const NhVector raw = nh_values(khop_index(g, 1), l);
  const NhVector norm = normalize_metric(raw);
  const NodeHomophily hom = node_homophily(g, l);
  write_metric_dump(dir_ / "a.csv", raw, norm, hom);
  write_metric_dump(dir_ / "b.csv", raw, norm, hom);
  const std::string a = slurp(dir_ / "a.csv");
  EXPECT_EQ(a, slurp(dir_ / "b.csv"));
  EXPECT_EQ(a,
            "node_id,nh_raw,nh_norm,node_hom\n"
            "0,1,1,1\n"
            "1,0.5,0,0.5\n"
            "2,1,1,0\n");
}

TEST_F(Exports, EmptyBinTableIsHeaderOnly) {
  const std::vector<double> metric;
  const std::vector<std::uint8_t> correct;
  write_bin_table(dir_ / "bins.csv", bin_accuracy(metric, correct));
  EXPECT_EQ(slurp(dir_ / "bins.csv"), "bin_lo,bin_hi,count,correct,accuracy\n");
}

TEST_F(Exports, BinTableSkipsEmptyBins) {
  const std::vector<double> metric{0.05, 0.07, 0.95};
  const std::vector<std::uint8_t> correct{1, 0, 1};
  write_bin_table(dir_ / "bins.csv", bin_accuracy(metric, correct));
  EXPECT_EQ(slurp(dir_ / "bins.csv"),
            "bin_lo,bin_hi,count,correct,accuracy\n"
            "0,0.1,2,1,0.5\n"
            "0.9,1,1,1,1\n");
}

TEST(Format, SixSignificantDigits) {
  EXPECT_EQ(fmt6(1.0 / 3.0), "0.333333");
  EXPECT_EQ(fmt6(0.5), "0.5");
  EXPECT_EQ(round6(2.0 / 3.0), 0.666667);
}

using Checkpoints = TempDir;

TEST_F(Checkpoints, RoundTripIsBitwise) {
  Checkpoint c;
  c.config = preset_config("texas", Arch::kNhgcn);
  c.config.model.in_features = 4;
  c.config.model.num_classes = 3;
  c.config.model.hidden = 5;
  c.dataset_name = "toy";
  c.params = init_params(c.config.model, 7);
  c.params.get("alpha").data = {0.1, -1.0 / 3.0, 5e-320};
  MaskPair m;
  m.low = {1, 0, 0, 1};
  m.high = {0, 1, 1, 0};
  m.threshold = c.config.model.threshold();
  c.masks = m;
  save_checkpoint(c, dir_ / "ckpt.txt");
  const Checkpoint d = load_checkpoint(dir_ / "ckpt.txt");
  EXPECT_EQ(d.params, c.params);
  ASSERT_TRUE(d.masks.has_value());
  EXPECT_EQ(d.masks->low, m.low);
  EXPECT_EQ(d.masks->high, m.high);
  EXPECT_EQ(d.dataset_name, "toy");
  EXPECT_EQ(echo_config(d.config), echo_config(c.config));
}

TEST_F(Checkpoints, MissingAndCorruptFiles) {
  EXPECT_THROW(load_checkpoint(dir_ / "nope.txt"), IoError);
  put("bad.txt", "nhgcn-checkpoint 1\ngarbage\n");
  EXPECT_THROW(load_checkpoint(dir_ / "bad.txt"), IoError);
}
