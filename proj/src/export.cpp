#include "nhgcn/export.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nhgcn/error.hpp"

namespace nhg {

namespace fs = std::filesystem;

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double round6(double x) { return std::strtod(fmt6(x).c_str(), nullptr); }

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    if (ec) throw IoError(file.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(file.string() + ": cannot open for writing");
  out << text;
  out.close();
  if (!out) throw IoError(file.string() + ": write failed");
}

void write_metric_dump(const fs::path& file, const NhVector& raw, const NhVector& norm,
                       const NodeHomophily& hom) {
  if (raw.size() != norm.size() || raw.size() != hom.per_node.size()) {
    throw ShapeError("metric dump columns differ in length");
  }
  std::ostringstream os;
  os << "node_id,nh_raw,nh_norm,node_hom\n";
  for (std::size_t i = 0; i < raw.size(); ++i) {
    os << i << ',' << fmt6(raw.values[i]) << ',' << fmt6(norm.values[i]) << ',' << fmt6(hom.per_node[i]) << '\n';
  }
  write_text(file, os.str());
}

void write_bin_table(const fs::path& file, const BinTable& table) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count,correct,accuracy\n";
  for (std::size_t b = 0; b < kNumBins; ++b) {
    const BinStat& s = table.bins[b];
    if (!s.accuracy) continue;
    os << fmt6(static_cast<double>(b) / kNumBins) << ',' << fmt6(static_cast<double>(b + 1) / kNumBins) << ','
       << s.count << ',' << s.correct << ',' << fmt6(*s.accuracy) << '\n';
  }
  write_text(file, os.str());
}

void write_epoch_log(const fs::path& file, std::span<const EpochLog> log) {
  std::ostringstream os;
  os << "epoch,loss,acc_train,acc_val,acc_test,nh_updated,mask_acc\n";
  for (const EpochLog& r : log) {
    os << r.epoch << ',' << fmt6(r.loss) << ',' << fmt6(r.acc_train) << ',' << fmt6(r.acc_val) << ','
       << fmt6(r.acc_test) << ',' << (r.nh_updated ? 1 : 0) << ',';
    if (r.mask_acc) os << fmt6(*r.mask_acc);
    os << '\n';
  }
  write_text(file, os.str());
}

void write_alpha_trace(const fs::path& file, std::span<const EpochLog> log) {
  const std::size_t k = log.empty() ? 0 : log.front().alpha.size();
  std::ostringstream os;
  os << "epoch";
  for (std::size_t j = 0; j < k; ++j) os << ",alpha_" << j;
  os << '\n';
  if (k > 0) {
    for (const EpochLog& r : log) {
      os << r.epoch;
      for (double a : r.alpha) os << ',' << fmt6(a);
      os << '\n';
    }
  }
  write_text(file, os.str());
}

void write_seed_table(const fs::path& file, const MultiSeedResult& ms) {
  std::ostringstream os;
  os << "seed,status,test_acc,best_epoch,error\n";
  for (const SeedOutcome& o : ms.runs) {
    os << o.seed << ',' << (o.ok ? "ok" : "excluded") << ',';
    if (o.ok) os << fmt6(o.test_acc) << ',' << o.best_epoch;
    else os << ',';
    std::string err = o.error;
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ' ';
    }
    os << ',' << err << '\n';
  }
  write_text(file, os.str());
}

void write_json(const fs::path& file, const Json& doc) { write_text(file, doc.dump(2) + "\n"); }

Json run_summary(const RunResult& r) {
  Json j;
  j["best_epoch"] = r.best_epoch;
  j["epochs_run"] = r.log.size();
  j["best_val_acc"] = round6(r.best_val);
  j["test_acc"] = round6(r.test_acc);
  j["test_acc_final_masks"] = round6(r.test_acc_final_masks);
  j["nh_updates"] = r.nh_history.size();
  j["param_count"] = r.best_params.scalar_count();
  if (!r.log.empty()) j["final_loss"] = round6(r.log.back().loss);
  if (r.best_epoch > 0 && r.best_epoch <= r.log.size()) {
    const EpochLog& best = r.log[r.best_epoch - 1];
    if (best.mask_acc) j["mask_acc_at_best"] = round6(*best.mask_acc);
    if (!best.alpha.empty()) {
      Json a = Json::array();
      for (double v : best.alpha) a.push_back(round6(v));
      j["alpha_at_best"] = a;
    }
  }
  return j;
}

}  // namespace nhg
