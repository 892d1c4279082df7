#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "nhgcn/metrics.hpp"
#include "nhgcn/training.hpp"

namespace nhg {

using Json = nlohmann::ordered_json;

/// "%.6g".
std::string fmt6(double x);
/// `x` rounded to 6 significant digits, for JSON output.
double round6(double x);

/// node_id,nh_raw,nh_norm,node_hom
void write_metric_dump(const std::filesystem::path& file, const NhVector& raw, const NhVector& norm,
                       const NodeHomophily& hom);

/// bin_lo,bin_hi,count,correct,accuracy; empty bins are omitted.
void write_bin_table(const std::filesystem::path& file, const BinTable& table);

/// epoch,loss,acc_train,acc_val,acc_test,nh_updated,mask_acc
void write_epoch_log(const std::filesystem::path& file, std::span<const EpochLog> log);

/// epoch,alpha_0,...; header "epoch" alone when the model has no weights.
void write_alpha_trace(const std::filesystem::path& file, std::span<const EpochLog> log);

/// seed,status,test_acc,best_epoch,error
void write_seed_table(const std::filesystem::path& file, const MultiSeedResult& ms);

void write_json(const std::filesystem::path& file, const Json& doc);
void write_text(const std::filesystem::path& file, const std::string& text);

/// Best-epoch figures of one run (no timing, so reruns are byte-identical).
Json run_summary(const RunResult& r);

}  // namespace nhg
