#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nhgcn/error.hpp"
#include "nhgcn/graph.hpp"
#include "nhgcn/metrics.hpp"
#include "nhgcn/tensor.hpp"

namespace nhg {

struct Dataset {
  std::string name;
  Graph graph;
  Tensor features;
  LabelVec labels;

  std::size_t num_nodes() const { return graph.num_nodes(); }
  std::size_t num_features() const { return features.cols; }
  std::size_t num_classes() const { return labels.num_classes; }
};

enum class DatasetErrorKind { kMissingFile, kInconsistent, kNonNumeric, kOutOfRange };

/// Dataset directory problem, tagged with the file and 1-based line (0 when
/// the problem is not tied to a line).
class DatasetError : public IoError {
 public:
  DatasetError(DatasetErrorKind kind, const std::filesystem::path& file, std::size_t line,
               const std::string& what);
  DatasetErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  DatasetErrorKind kind_;
  std::size_t line_;
};

/// Reads meta.tsv, edges.tsv, features.tsv and labels.tsv from `dir`.
///
/// meta.tsv holds "key<TAB>value" lines for name, n, f and C. edges.tsv
/// holds "u<TAB>v" lines; features.tsv "id<TAB>x_1 ... x_f"; labels.tsv
/// "id<TAB>class". Blank lines and lines starting with '#' are skipped.
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes the same layout; feature values use 17 significant digits so a
/// reload is bitwise identical.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

enum class SynthKind { kBipartite, kPlantedPartition };

struct SynthSpec {
  SynthKind kind = SynthKind::kPlantedPartition;
  /// Side sizes (bipartite) or per-class block sizes (planted partition).
  std::vector<std::size_t> sizes;
  /// Intra-block edge probability (planted partition only).
  double p_in = 0.0;
  /// Cross-block probability; for bipartite graphs the cross-side probability.
  double p_out = 0.0;
  /// Extra nodes with uniformly random labels wired to `hub_degree`
  /// uniformly chosen block nodes (planted partition only).
  std::size_t hubs = 0;
  std::size_t hub_degree = 0;
  std::size_t num_features = 8;
  /// Class c has mean `mean_scale` on feature dims d with d % C == c.
  double mean_scale = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::string name = "synthetic";

  /// Throws InputError on probabilities outside [0, 1] or empty sizes.
  void validate() const;
};

Dataset generate(const SynthSpec& spec);

}  // namespace nhg
