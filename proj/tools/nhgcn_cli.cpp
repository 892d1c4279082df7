// Command-line front end: metrics, train, multiseed, synth, gradcheck, bins.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nhgcn/nhgcn.h"

namespace {

namespace fs = std::filesystem;

struct CliError {
  nhg_status status;
};

void check(nhg_status s) {
  if (s != NHG_OK) throw CliError{s};
}

using DatasetPtr = std::unique_ptr<nhg_dataset, decltype(&nhg_dataset_free)>;
using ConfigPtr = std::unique_ptr<nhg_config, decltype(&nhg_config_free)>;

DatasetPtr load(const std::string& dir) {
  nhg_dataset* ds = nullptr;
  check(nhg_dataset_load(dir.c_str(), &ds));
  return DatasetPtr(ds, nhg_dataset_free);
}

std::string config_value(const nhg_config* cfg, const char* key) {
  size_t needed = 0;
  check(nhg_config_get(cfg, key, nullptr, 0, &needed));
  std::string out(needed, '\0');
  check(nhg_config_get(cfg, key, out.data(), out.size(), &needed));
  out.resize(needed - 1);
  return out;
}

// Output directory: --out, else the config's out key, else
// $NHGCN_OUT_ROOT (or ./runs) / <command>-<dataset>.
std::string resolve_out(const std::string& flag, const std::string& from_config, const std::string& command,
                        const std::string& dataset) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  const char* root = std::getenv("NHGCN_OUT_ROOT");
  fs::path base = root && *root ? fs::path(root) : fs::path("runs");
  fs::path ds(dataset);
  if (ds.filename().empty()) ds = ds.parent_path();
  return (base / (command + "-" + ds.filename().string())).string();
}

// Flags shared by the model-running subcommands. Empty / unset values leave
// the config file (or defaults) in charge.
struct RunFlags {
  std::string config;
  std::string dataset;
  std::string arch;
  std::string combiner;
  std::string self_loop;
  std::string seeds;
  std::string out;
  std::optional<std::size_t> hop;
  std::optional<double> inv_threshold;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::string> sets;
  bool time = false;

  void add_to(CLI::App* app, bool with_seeds) {
    app->add_option("--config", config, "key=value run config file");
    app->add_option("--dataset", dataset, "dataset directory");
    app->add_option("--arch", arch, "nhgcn, nhgcn_ss, gcn, mlp or gcn_plus_x");
    app->add_option("--hop", hop, "neighborhood hop k");
    app->add_option("--inv-threshold", inv_threshold, "1/T");
    app->add_option("--combiner", combiner, "add, concatenate or maxpooling");
    app->add_option("--self-loop", self_loop, "true or false");
    app->add_option("--seed", seed, "run seed");
    if (with_seeds) {
      app->add_option("--seeds", seeds, "seed list, e.g. 0-9 or 1,5,7");
      app->add_option("--threads", threads, "worker threads");
    }
    app->add_option("--set", sets, "extra key=value override (repeatable)");
    app->add_option("--out", out, "output directory");
    app->add_flag("--time", time, "print mean per-epoch and total wall time");
  }

  ConfigPtr build() const {
    nhg_config* raw = nullptr;
    check(nhg_config_new(&raw));
    ConfigPtr cfg(raw, nhg_config_free);
    if (!config.empty()) check(nhg_config_load(cfg.get(), config.c_str()));
    auto set = [&](const char* key, const std::string& v) {
      if (!v.empty()) check(nhg_config_set(cfg.get(), key, v.c_str()));
    };
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
      set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
    set("dataset", dataset);
    set("arch", arch);
    set("combiner", combiner);
    set("self_loop", self_loop);
    set("seeds", seeds);
    if (hop) set("hop", std::to_string(*hop));
    if (inv_threshold) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", *inv_threshold);
      set("inv_threshold", buf);
    }
    if (seed) set("seed", std::to_string(*seed));
    if (threads) set("threads", std::to_string(*threads));
    return cfg;
  }
};

int cmd_metrics(const std::string& dataset, const std::vector<std::size_t>& hops, const std::string& out_flag) {
  DatasetPtr ds = load(dataset);
  const std::string out = resolve_out(out_flag, "", "metrics", dataset);
  std::vector<nhg_metric_row> rows(hops.size());
  check(nhg_metrics(ds.get(), hops.data(), hops.size(), out.c_str(), rows.data()));
  nhg_dataset_info info{};
  check(nhg_dataset_describe(ds.get(), &info));
  std::printf("nodes %zu  edges %zu  classes %zu\n", info.num_nodes, info.num_edges, info.num_classes);
  std::printf("%-8s %10s %10s\n", "metric", "raw", "norm");
  std::printf("%-8s %10.3f %10s  (min-max over [1/C, 1]: %.3f)\n", "H^node", rows[0].node_hom, "-",
              rows[0].node_hom_minmax);
  for (const nhg_metric_row& r : rows) {
    const std::string name = "NH^" + std::to_string(r.hop);
    std::printf("%-8s %10.3f %10.3f\n", name.c_str(), r.nh_raw, r.nh_norm);
  }
  std::printf("written to %s\n", out.c_str());
  return 0;
}

int cmd_train(const RunFlags& flags) {
  ConfigPtr cfg = flags.build();
  const std::string dataset = config_value(cfg.get(), "dataset");
  if (dataset.empty()) throw CLI::ValidationError("--dataset", "no dataset given (flag or config key)");
  DatasetPtr ds = load(dataset);
  const std::string out = resolve_out(flags.out, config_value(cfg.get(), "out"), "train", dataset);
  nhg_run_summary s{};
  check(nhg_train(ds.get(), cfg.get(), out.c_str(), &s));
  std::printf("best epoch %zu of %zu  val %.4f  test %.4f  (final-mask test %.4f)\n", s.best_epoch, s.epochs_run,
              s.best_val_acc, s.test_acc, s.test_acc_final_masks);
  if (flags.time) std::printf("time: %.3f ms/epoch, %.3f s total\n", 1e3 * s.mean_epoch_seconds, s.total_seconds);
  std::printf("written to %s\n", out.c_str());
  return 0;
}

int cmd_multiseed(const RunFlags& flags) {
  ConfigPtr cfg = flags.build();
  const std::string dataset = config_value(cfg.get(), "dataset");
  if (dataset.empty()) throw CLI::ValidationError("--dataset", "no dataset given (flag or config key)");
  DatasetPtr ds = load(dataset);
  const std::string out = resolve_out(flags.out, config_value(cfg.get(), "out"), "multiseed", dataset);
  nhg_multiseed_summary s{};
  check(nhg_multiseed(ds.get(), cfg.get(), out.c_str(), &s));
  std::printf("%s  %s  %.2f +/- %.2f  (%zu runs, %zu excluded)\n", dataset.c_str(),
              config_value(cfg.get(), "arch").c_str(), 100.0 * s.mean, 100.0 * s.stddev, s.runs, s.excluded);
  if (flags.time) std::printf("time: %.3f ms/epoch, %.3f s total\n", 1e3 * s.mean_epoch_seconds, s.total_seconds);
  std::printf("written to %s\n", out.c_str());
  return 0;
}

int cmd_gradcheck(const RunFlags& flags) {
  ConfigPtr cfg = flags.build();
  double err = 0.0;
  check(nhg_gradcheck(cfg.get(), flags.seed.value_or(0), &err));
  const bool ok = err < 1e-4;
  std::printf("max relative error %.3e (%s)\n", err, ok ? "ok" : "FAILED");
  return ok ? 0 : 1;
}

struct SynthFlags {
  std::string kind;
  std::vector<std::string> tail;
  std::vector<std::size_t> sizes;
  std::optional<double> p_in, p_out;
  std::size_t hubs = 0;
  std::size_t hub_degree = 0;
  std::size_t features = 8;
  double mean_scale = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::string name = "synthetic";
  std::string out;
};

double parse_prob(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("synth", "expected a probability, got '" + s + "'");
}

std::size_t parse_size(const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size() && s.find('-') == std::string::npos) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("synth", "expected a size, got '" + s + "'");
}

int cmd_synth(SynthFlags f) {
  nhg_synth_spec spec;
  nhg_synth_spec_init(&spec);
  if (f.kind == "bipartite") {
    spec.kind = NHG_SYNTH_BIPARTITE;
    // synth bipartite A B P
    if (!f.tail.empty()) {
      if (f.tail.size() != 3) throw CLI::ValidationError("synth", "bipartite takes: SIZE_A SIZE_B P");
      f.sizes = {parse_size(f.tail[0]), parse_size(f.tail[1])};
      f.p_out = parse_prob(f.tail[2]);
    }
  } else if (f.kind == "planted_partition" || f.kind == "planted") {
    spec.kind = NHG_SYNTH_PLANTED_PARTITION;
    // synth planted_partition S_1 ... S_C P_IN P_OUT
    if (!f.tail.empty()) {
      if (f.tail.size() < 4) throw CLI::ValidationError("synth", "planted_partition takes: S_1 .. S_C P_IN P_OUT");
      f.sizes.clear();
      for (std::size_t i = 0; i + 2 < f.tail.size(); ++i) f.sizes.push_back(parse_size(f.tail[i]));
      f.p_in = parse_prob(f.tail[f.tail.size() - 2]);
      f.p_out = parse_prob(f.tail.back());
    }
  } else {
    throw CLI::ValidationError("synth", "kind must be bipartite or planted_partition");
  }
  spec.sizes = f.sizes.data();
  spec.num_sizes = f.sizes.size();
  spec.p_in = f.p_in.value_or(0.0);
  spec.p_out = f.p_out.value_or(0.0);
  spec.hubs = f.hubs;
  spec.hub_degree = f.hub_degree;
  spec.num_features = f.features;
  spec.mean_scale = f.mean_scale;
  spec.sigma = f.sigma;
  spec.seed = f.seed;
  spec.name = f.name.c_str();
  nhg_dataset* raw = nullptr;
  check(nhg_dataset_synth(&spec, &raw));
  DatasetPtr ds(raw, nhg_dataset_free);
  const std::string out = resolve_out(f.out, "", "synth", f.name);
  check(nhg_dataset_save(ds.get(), out.c_str()));
  nhg_dataset_info info{};
  check(nhg_dataset_describe(ds.get(), &info));
  std::printf("nodes %zu  edges %zu  classes %zu  written to %s\n", info.num_nodes, info.num_edges,
              info.num_classes, out.c_str());
  return 0;
}

int cmd_bins(const std::string& dataset, const std::string& checkpoint, const std::string& metric,
             const std::string& out_flag) {
  nhg_bin_metric m;
  if (metric == "nh") {
    m = NHG_BIN_NH;
  } else if (metric == "node_hom") {
    m = NHG_BIN_NODE_HOMOPHILY;
  } else {
    throw CLI::ValidationError("--metric", "must be nh or node_hom");
  }
  DatasetPtr ds = load(dataset);
  fs::path out = resolve_out(out_flag, "", "bins", dataset);
  if (out.extension() != ".csv") out /= "bins_" + metric + ".csv";
  double acc[10];
  check(nhg_bins(ds.get(), checkpoint.c_str(), m, out.string().c_str(), acc));
  std::printf("%-12s %8s\n", "bin", "accuracy");
  for (int b = 0; b < 10; ++b) {
    if (std::isnan(acc[b])) continue;
    std::printf("[%.1f, %.1f%c %8.4f\n", b / 10.0, (b + 1) / 10.0, b == 9 ? ']' : ')', acc[b]);
  }
  std::printf("written to %s\n", out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neighborhood homophily GCN toolkit"};
  app.require_subcommand(1);

  std::string m_dataset, m_out;
  std::vector<std::size_t> m_hops{1, 2};
  auto* metrics = app.add_subcommand("metrics", "homophily metrics of a dataset");
  metrics->add_option("--dataset", m_dataset, "dataset directory")->required();
  metrics->add_option("--hop", m_hops, "hops to evaluate (default 1 2)");
  metrics->add_option("--out", m_out, "output directory");

  RunFlags train_flags;
  auto* train = app.add_subcommand("train", "single training run");
  train_flags.add_to(train, false);

  RunFlags ms_flags;
  auto* multiseed = app.add_subcommand("multiseed", "repeated runs over seeds, mean and std");
  ms_flags.add_to(multiseed, true);

  RunFlags gc_flags;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gc_flags.add_to(gradcheck, false);

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("kind", sf.kind, "bipartite or planted_partition")->required();
  synth->add_option("params", sf.tail, "sizes then probabilities");
  synth->add_option("--sizes", sf.sizes, "side or class block sizes");
  synth->add_option("--p-in", sf.p_in, "intra-class edge probability");
  synth->add_option("--p-out", sf.p_out, "inter-class edge probability");
  synth->add_option("--hubs", sf.hubs, "heterophilous hub nodes");
  synth->add_option("--hub-degree", sf.hub_degree, "edges per hub");
  synth->add_option("--features", sf.features, "feature dimension");
  synth->add_option("--mean-scale", sf.mean_scale, "class mean magnitude");
  synth->add_option("--sigma", sf.sigma, "feature noise");
  synth->add_option("--seed", sf.seed, "generator seed");
  synth->add_option("--name", sf.name, "dataset name");
  synth->add_option("--out", sf.out, "output directory");

  std::string b_dataset, b_checkpoint, b_metric = "nh", b_out;
  auto* bins = app.add_subcommand("bins", "per-bin test accuracy of a checkpoint");
  bins->add_option("--dataset", b_dataset, "dataset directory")->required();
  bins->add_option("--checkpoint", b_checkpoint, "checkpoint.txt from train")->required();
  bins->add_option("--metric", b_metric, "nh or node_hom");
  bins->add_option("--out", b_out, "output directory or .csv path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*metrics) return cmd_metrics(m_dataset, m_hops, m_out);
    if (*train) return cmd_train(train_flags);
    if (*multiseed) return cmd_multiseed(ms_flags);
    if (*gradcheck) return cmd_gradcheck(gc_flags);
    if (*synth) return cmd_synth(sf);
    if (*bins) return cmd_bins(b_dataset, b_checkpoint, b_metric, b_out);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error (%s): %s\n", nhg_status_name(e.status), nhg_last_error());
    return 1;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }
  return 0;
}
