#include "nhgcn/nhgcn.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "nhgcn/checkpoint.hpp"
#include "nhgcn/config.hpp"
#include "nhgcn/dataset.hpp"
#include "nhgcn/diagnostics.hpp"
#include "nhgcn/error.hpp"
#include "nhgcn/export.hpp"
#include "nhgcn/training.hpp"

struct nhg_dataset {
  nhg::Dataset ds;
};

struct nhg_config {
  std::vector<nhg::Setting> settings;
};

namespace {

thread_local std::string g_last_error;

nhg_status fail(nhg_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
nhg_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return NHG_OK;
  } catch (const nhg::DatasetError& e) {
    return fail(NHG_ERR_DATASET, e.what());
  } catch (const nhg::IoError& e) {
    return fail(NHG_ERR_IO, e.what());
  } catch (const nhg::ConfigError& e) {
    return fail(NHG_ERR_CONFIG, e.what());
  } catch (const nhg::InputError& e) {
    return fail(NHG_ERR_INPUT, e.what());
  } catch (const nhg::ShapeError& e) {
    return fail(NHG_ERR_SHAPE, e.what());
  } catch (const nhg::StateError& e) {
    return fail(NHG_ERR_STATE, e.what());
  } catch (const nhg::DivergenceError& e) {
    return fail(NHG_ERR_DIVERGED, e.what());
  } catch (const std::exception& e) {
    return fail(NHG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NHG_ERR_INTERNAL, "unknown exception");
  }
}

nhg_status null_arg(const char* name) { return fail(NHG_ERR_INVALID_ARGUMENT, std::string(name) + " is null"); }

void copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

nhg::RunConfig resolve_for(const nhg_config& cfg, const nhg::Dataset& ds) {
  nhg::RunConfig rc = nhg::resolve_config(cfg.settings);
  rc.model.in_features = ds.num_features();
  rc.model.num_classes = ds.num_classes();
  rc.model.validate();
  return rc;
}

std::filesystem::path out_dir_for(const char* out_dir, nhg::RunConfig& rc) {
  if (out_dir && *out_dir) rc.out = out_dir;
  if (rc.out.empty()) throw nhg::ConfigError("config key 'out': no output directory given");
  return rc.out;
}

double mean_epoch_seconds(const nhg::RunResult& r) {
  if (r.log.empty()) return 0.0;
  double s = 0.0;
  for (const auto& row : r.log) s += row.seconds;
  return s / static_cast<double>(r.log.size());
}

void write_run(const std::filesystem::path& dir, const nhg::RunConfig& rc, const nhg::Dataset& ds,
               const nhg::RunResult& r) {
  nhg::write_text(dir / "config.txt", nhg::echo_config(rc));
  nhg::write_epoch_log(dir / "epochs.csv", r.log);
  nhg::write_alpha_trace(dir / "alpha.csv", r.log);
  nhg::Json j;
  j["dataset"] = ds.name;
  j["arch"] = nhg::to_string(rc.model.arch);
  j["seed"] = rc.train.seed;
  const nhg::Json summary = nhg::run_summary(r);
  for (const auto& [k, v] : summary.items()) j[k] = v;
  nhg::Json config;
  for (const auto& [k, v] : nhg::parse_settings(nhg::echo_config(rc))) config[k] = v;
  j["config"] = config;
  nhg::write_json(dir / "summary.json", j);

  nhg::Checkpoint ck;
  ck.config = rc;
  ck.dataset_name = ds.name;
  ck.params = r.best_params;
  if (rc.model.uses_masks()) ck.masks = r.best_masks;
  nhg::save_checkpoint(ck, dir / "checkpoint.txt");
}

}  // namespace

extern "C" {

const char* nhg_version(void) { return "1.0.0"; }

const char* nhg_status_name(nhg_status s) {
  switch (s) {
    case NHG_OK: return "ok";
    case NHG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NHG_ERR_INPUT: return "invalid input";
    case NHG_ERR_SHAPE: return "shape mismatch";
    case NHG_ERR_CONFIG: return "configuration error";
    case NHG_ERR_IO: return "i/o error";
    case NHG_ERR_DATASET: return "dataset error";
    case NHG_ERR_STATE: return "invalid state";
    case NHG_ERR_DIVERGED: return "training diverged";
    case NHG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nhg_last_error(void) { return g_last_error.c_str(); }

nhg_status nhg_dataset_load(const char* dir, nhg_dataset** out) {
  if (!dir) return null_arg("dir");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new nhg_dataset{nhg::load_dataset(dir)}; });
}

nhg_status nhg_dataset_save(const nhg_dataset* ds, const char* dir) {
  if (!ds) return null_arg("ds");
  if (!dir) return null_arg("dir");
  return guarded([&] { nhg::save_dataset(ds->ds, dir); });
}

void nhg_dataset_free(nhg_dataset* ds) { delete ds; }

nhg_status nhg_dataset_describe(const nhg_dataset* ds, nhg_dataset_info* out) {
  if (!ds) return null_arg("ds");
  if (!out) return null_arg("out");
  out->num_nodes = ds->ds.num_nodes();
  out->num_edges = ds->ds.graph.num_edges();
  out->num_features = ds->ds.num_features();
  out->num_classes = ds->ds.num_classes();
  out->dropped_self_loops = ds->ds.graph.dropped_self_loops();
  return NHG_OK;
}

nhg_status nhg_dataset_name(const nhg_dataset* ds, char* buf, size_t cap) {
  if (!ds) return null_arg("ds");
  if (!buf || cap == 0) return null_arg("buf");
  copy_out(ds->ds.name, buf, cap, nullptr);
  return NHG_OK;
}

void nhg_synth_spec_init(nhg_synth_spec* spec) {
  if (!spec) return;
  const nhg::SynthSpec d;
  *spec = nhg_synth_spec{};
  spec->kind = NHG_SYNTH_PLANTED_PARTITION;
  spec->num_features = d.num_features;
  spec->mean_scale = d.mean_scale;
  spec->sigma = d.sigma;
  spec->name = "synthetic";
}

nhg_status nhg_dataset_synth(const nhg_synth_spec* spec, nhg_dataset** out) {
  if (!spec) return null_arg("spec");
  if (!out) return null_arg("out");
  if (spec->num_sizes > 0 && !spec->sizes) return null_arg("spec->sizes");
  *out = nullptr;
  return guarded([&] {
    nhg::SynthSpec s;
    s.kind = spec->kind == NHG_SYNTH_BIPARTITE ? nhg::SynthKind::kBipartite : nhg::SynthKind::kPlantedPartition;
    s.sizes.assign(spec->sizes, spec->sizes + spec->num_sizes);
    s.p_in = spec->p_in;
    s.p_out = spec->p_out;
    s.hubs = spec->hubs;
    s.hub_degree = spec->hub_degree;
    s.num_features = spec->num_features;
    s.mean_scale = spec->mean_scale;
    s.sigma = spec->sigma;
    s.seed = spec->seed;
    if (spec->name) s.name = spec->name;
    *out = new nhg_dataset{nhg::generate(s)};
  });
}

nhg_status nhg_config_new(nhg_config** out) {
  if (!out) return null_arg("out");
  *out = new nhg_config{};
  return NHG_OK;
}

void nhg_config_free(nhg_config* cfg) { delete cfg; }

nhg_status nhg_config_load(nhg_config* cfg, const char* path) {
  if (!cfg) return null_arg("cfg");
  if (!path) return null_arg("path");
  return guarded([&] {
    auto settings = nhg::read_settings(path);
    nhg::RunConfig scratch;
    for (const auto& [k, v] : settings) nhg::apply_setting(scratch, k, v);
    cfg->settings.insert(cfg->settings.end(), settings.begin(), settings.end());
  });
}

nhg_status nhg_config_set(nhg_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return guarded([&] {
    nhg::RunConfig scratch;
    nhg::apply_setting(scratch, key, value);
    cfg->settings.emplace_back(key, value);
  });
}

nhg_status nhg_config_get(const nhg_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  return guarded([&] {
    const std::string echo = nhg::echo_config(nhg::resolve_config(cfg->settings));
    for (const auto& [k, v] : nhg::parse_settings(echo)) {
      if (k == key) {
        copy_out(v, buf, cap, needed);
        return;
      }
    }
    throw nhg::ConfigError(std::string("unknown config key '") + key + "'");
  });
}

nhg_status nhg_config_echo(const nhg_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] { copy_out(nhg::echo_config(nhg::resolve_config(cfg->settings)), buf, cap, needed); });
}

nhg_status nhg_metrics(const nhg_dataset* ds, const size_t* hops, size_t num_hops, const char* out_dir,
                       nhg_metric_row* rows) {
  if (!ds) return null_arg("ds");
  if (!hops || num_hops == 0) return null_arg("hops");
  if (!out_dir) return null_arg("out_dir");
  return guarded([&] {
    const nhg::Dataset& d = ds->ds;
    const std::filesystem::path dir(out_dir);
    const nhg::NodeHomophily hom = nhg::node_homophily(d.graph, d.labels);
    const double inv_c = 1.0 / static_cast<double>(d.num_classes());
    const double hom_minmax = (hom.graph_level - inv_c) / (1.0 - inv_c);

    nhg::Json j;
    j["dataset"] = d.name;
    j["nodes"] = d.num_nodes();
    j["edges"] = d.graph.num_edges();
    j["classes"] = d.num_classes();
    j["node_homophily"] = nhg::round6(hom.graph_level);
    j["node_homophily_minmax"] = nhg::round6(hom_minmax);
    j["nh"] = nhg::Json::array();
    for (size_t h = 0; h < num_hops; ++h) {
      const nhg::NhVector raw = nhg::nh_values(nhg::khop_index(d.graph, hops[h]), d.labels);
      const nhg::NhVector norm = nhg::normalize_metric(raw);
      nhg::write_metric_dump(dir / ("metrics_k" + std::to_string(hops[h]) + ".csv"), raw, norm, hom);
      nhg::Json row;
      row["hop"] = hops[h];
      row["raw"] = nhg::round6(raw.mean());
      row["norm"] = nhg::round6(norm.mean());
      j["nh"].push_back(row);
      if (rows) rows[h] = nhg_metric_row{hops[h], raw.mean(), norm.mean(), hom.graph_level, hom_minmax};
    }
    nhg::write_json(dir / "summary.json", j);
  });
}

nhg_status nhg_train(const nhg_dataset* ds, const nhg_config* cfg, const char* out_dir, nhg_run_summary* out) {
  if (!ds) return null_arg("ds");
  if (!cfg) return null_arg("cfg");
  return guarded([&] {
    const nhg::Dataset& d = ds->ds;
    nhg::RunConfig rc = resolve_for(*cfg, d);
    const std::filesystem::path dir = out_dir_for(out_dir, rc);
    const nhg::Split split = nhg::make_split(d.num_nodes(), d.labels, rc.train.seed, rc.train.ratios);
    const nhg::RunResult r = nhg::train_run(d.graph, d.features, d.labels, split, rc.model, rc.train);
    write_run(dir, rc, d, r);
    if (out) {
      *out = nhg_run_summary{r.best_epoch, r.log.size(), r.best_val, r.test_acc, r.test_acc_final_masks,
                             mean_epoch_seconds(r), r.total_seconds};
    }
  });
}

nhg_status nhg_multiseed(const nhg_dataset* ds, const nhg_config* cfg, const char* out_dir,
                         nhg_multiseed_summary* out) {
  if (!ds) return null_arg("ds");
  if (!cfg) return null_arg("cfg");
  return guarded([&] {
    const nhg::Dataset& d = ds->ds;
    nhg::RunConfig rc = resolve_for(*cfg, d);
    const std::filesystem::path dir = out_dir_for(out_dir, rc);
    const nhg::MultiSeedResult ms =
        nhg::multi_seed(d.graph, d.features, d.labels, rc.model, rc.train, rc.seeds, rc.threads);

    nhg::write_text(dir / "config.txt", nhg::echo_config(rc));
    double epoch_seconds = 0.0;
    double total_seconds = 0.0;
    std::size_t epochs = 0;
    for (const nhg::SeedOutcome& o : ms.runs) {
      if (!o.ok) continue;
      nhg::RunConfig seed_cfg = rc;
      seed_cfg.train.seed = o.seed;
      seed_cfg.out = (dir / ("seed_" + std::to_string(o.seed))).string();
      write_run(seed_cfg.out, seed_cfg, d, o.result);
      for (const auto& row : o.result.log) epoch_seconds += row.seconds;
      epochs += o.result.log.size();
      total_seconds += o.result.total_seconds;
    }
    nhg::write_seed_table(dir / "seeds.csv", ms);

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f +/- %.2f", 100.0 * ms.mean, 100.0 * ms.stddev);
    nhg::Json j;
    j["dataset"] = d.name;
    j["arch"] = nhg::to_string(rc.model.arch);
    j["seeds"] = rc.seeds;
    j["runs"] = ms.runs.size() - ms.excluded;
    j["excluded"] = ms.excluded;
    j["mean_test_acc"] = nhg::round6(ms.mean);
    j["std_test_acc"] = nhg::round6(ms.stddev);
    j["table_row"] = buf;
    nhg::write_json(dir / "summary.json", j);
    if (out) {
      *out = nhg_multiseed_summary{ms.mean, ms.stddev, ms.runs.size() - ms.excluded, ms.excluded,
                                   epochs ? epoch_seconds / static_cast<double>(epochs) : 0.0, total_seconds};
    }
  });
}

nhg_status nhg_gradcheck(const nhg_config* cfg, uint64_t seed, double* max_rel_error) {
  if (!cfg) return null_arg("cfg");
  if (!max_rel_error) return null_arg("max_rel_error");
  return guarded([&] {
    const nhg::RunConfig rc = nhg::resolve_config(cfg->settings);
    *max_rel_error = nhg::check_model_gradients(rc.model, seed).max_rel_error;
  });
}

nhg_status nhg_bins(const nhg_dataset* ds, const char* checkpoint, nhg_bin_metric metric, const char* out_csv,
                    double* accuracy) {
  if (!ds) return null_arg("ds");
  if (!checkpoint) return null_arg("checkpoint");
  if (!out_csv) return null_arg("out_csv");
  return guarded([&] {
    const nhg::Dataset& d = ds->ds;
    const nhg::Checkpoint ck = nhg::load_checkpoint(checkpoint);
    const nhg::ModelConfig& m = ck.config.model;
    if (m.in_features != d.num_features() || m.num_classes != d.num_classes()) {
      throw nhg::ShapeError("checkpoint shape (f=" + std::to_string(m.in_features) + ", C=" +
                            std::to_string(m.num_classes) + ") does not match the dataset");
    }
    if (m.uses_masks() && (!ck.masks || ck.masks->low.size() != d.num_nodes())) {
      throw nhg::StateError("checkpoint lacks masks for this dataset");
    }
    const nhg::Split split = nhg::make_split(d.num_nodes(), d.labels, ck.config.train.seed, ck.config.train.ratios);
    const nhg::Prediction pred =
        nhg::evaluate(d.graph, d.features, ck.params, ck.masks ? &*ck.masks : nullptr, m);

    std::vector<double> all;
    if (metric == NHG_BIN_NODE_HOMOPHILY) {
      all = nhg::node_homophily(d.graph, d.labels).per_node;
    } else {
      all = nhg::normalize_metric(nhg::nh_values(nhg::khop_index(d.graph, m.hop), d.labels)).values;
    }
    std::vector<double> values;
    std::vector<std::uint8_t> correct;
    for (nhg::NodeId i : split.test) {
      values.push_back(all[i]);
      correct.push_back(pred.labels.y[i] == d.labels.y[i]);
    }
    const nhg::BinTable table = nhg::bin_accuracy(values, correct);
    nhg::write_bin_table(out_csv, table);
    if (accuracy) {
      for (std::size_t b = 0; b < nhg::kNumBins; ++b) {
        accuracy[b] = table.bins[b].accuracy.value_or(std::numeric_limits<double>::quiet_NaN());
      }
    }
  });
}

}  // extern "C"
