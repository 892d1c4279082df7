#include "nhgcn/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>

#include "nhgcn/rng.hpp"

namespace nhg {

namespace fs = std::filesystem;

DatasetError::DatasetError(DatasetErrorKind kind, const fs::path& file, std::size_t line,
                           const std::string& what)
    : IoError(file.string() + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
      kind_(kind),
      line_(line) {}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Calls fn(tokens, line_number) for every non-blank, non-comment line.
template <typename Fn>
void for_each_record(const fs::path& file, Fn&& fn) {
  std::ifstream in(file);
  if (!in) throw DatasetError(DatasetErrorKind::kMissingFile, file, 0, "cannot open file");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    fn(toks, lineno);
  }
}

std::uint64_t parse_uint(std::string_view tok, const fs::path& file, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw DatasetError(DatasetErrorKind::kNonNumeric, file, line,
                       "expected a non-negative integer, got '" + std::string(tok) + "'");
  }
  return v;
}

double parse_real(std::string_view tok, const fs::path& file, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) {
    throw DatasetError(DatasetErrorKind::kNonNumeric, file, line,
                       "expected a finite real, got '" + std::string(tok) + "'");
  }
  return v;
}

void expect_fields(const std::vector<std::string_view>& toks, std::size_t n, const fs::path& file,
                   std::size_t line) {
  if (toks.size() != n) {
    throw DatasetError(DatasetErrorKind::kInconsistent, file, line,
                       "expected " + std::to_string(n) + " fields, found " + std::to_string(toks.size()));
  }
}

NodeId node_id(std::string_view tok, std::size_t n, const fs::path& file, std::size_t line) {
  const std::uint64_t v = parse_uint(tok, file, line);
  if (v >= n) {
    throw DatasetError(DatasetErrorKind::kOutOfRange, file, line,
                       "node id " + std::to_string(v) + " outside [0, " + std::to_string(n) + ")");
  }
  return static_cast<NodeId>(v);
}

}  // namespace

Dataset load_dataset(const fs::path& dir) {
  const fs::path meta_file = dir / "meta.tsv";
  std::map<std::string, std::pair<std::string, std::size_t>> meta;
  for_each_record(meta_file, [&](const auto& toks, std::size_t line) {
    expect_fields(toks, 2, meta_file, line);
    meta[std::string(toks[0])] = {std::string(toks[1]), line};
  });
  auto meta_uint = [&](const char* key) {
    auto it = meta.find(key);
    if (it == meta.end()) {
      throw DatasetError(DatasetErrorKind::kInconsistent, meta_file, 0, std::string("missing key '") + key + "'");
    }
    return static_cast<std::size_t>(parse_uint(it->second.first, meta_file, it->second.second));
  };
  Dataset ds;
  ds.name = meta.count("name") ? meta["name"].first : dir.filename().string();
  const std::size_t n = meta_uint("n");
  const std::size_t f = meta_uint("f");
  const std::size_t c = meta_uint("C");
  if (c < 2) throw DatasetError(DatasetErrorKind::kInconsistent, meta_file, meta["C"].second, "C must be >= 2");
  if (f == 0) throw DatasetError(DatasetErrorKind::kInconsistent, meta_file, meta["f"].second, "f must be >= 1");

  const fs::path edge_file = dir / "edges.tsv";
  std::vector<std::pair<NodeId, NodeId>> edges;
  for_each_record(edge_file, [&](const auto& toks, std::size_t line) {
    expect_fields(toks, 2, edge_file, line);
    edges.emplace_back(node_id(toks[0], n, edge_file, line), node_id(toks[1], n, edge_file, line));
  });
  ds.graph = build_graph(edges, n);

  const fs::path feat_file = dir / "features.tsv";
  ds.features = Tensor(n, f);
  std::vector<std::uint8_t> seen(n, 0);
  for_each_record(feat_file, [&](const auto& toks, std::size_t line) {
    expect_fields(toks, f + 1, feat_file, line);
    const NodeId v = node_id(toks[0], n, feat_file, line);
    if (seen[v]) throw DatasetError(DatasetErrorKind::kInconsistent, feat_file, line, "duplicate feature row");
    seen[v] = 1;
    for (std::size_t j = 0; j < f; ++j) ds.features(v, j) = parse_real(toks[j + 1], feat_file, line);
  });
  for (std::size_t v = 0; v < n; ++v) {
    if (!seen[v]) {
      throw DatasetError(DatasetErrorKind::kInconsistent, feat_file, 0,
                         "no feature row for node " + std::to_string(v));
    }
  }

  const fs::path label_file = dir / "labels.tsv";
  ds.labels.num_classes = c;
  ds.labels.y.assign(n, 0);
  std::fill(seen.begin(), seen.end(), 0);
  for_each_record(label_file, [&](const auto& toks, std::size_t line) {
    expect_fields(toks, 2, label_file, line);
    const NodeId v = node_id(toks[0], n, label_file, line);
    const std::uint64_t y = parse_uint(toks[1], label_file, line);
    if (y >= c) {
      throw DatasetError(DatasetErrorKind::kOutOfRange, label_file, line,
                         "class id " + std::to_string(y) + " outside [0, " + std::to_string(c) + ")");
    }
    if (seen[v]) throw DatasetError(DatasetErrorKind::kInconsistent, label_file, line, "duplicate label row");
    seen[v] = 1;
    ds.labels.y[v] = static_cast<std::uint32_t>(y);
  });
  for (std::size_t v = 0; v < n; ++v) {
    if (!seen[v]) {
      throw DatasetError(DatasetErrorKind::kInconsistent, label_file, 0, "no label for node " + std::to_string(v));
    }
  }
  return ds;
}

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(file.string() + ": cannot open for writing");
  return out;
}

}  // namespace

void save_dataset(const Dataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
  {
    auto out = open_out(dir / "meta.tsv");
    out << "name\t" << ds.name << "\nn\t" << ds.num_nodes() << "\nf\t" << ds.num_features() << "\nC\t"
        << ds.num_classes() << "\n";
  }
  {
    auto out = open_out(dir / "edges.tsv");
    for (auto [u, v] : ds.graph.edge_list()) out << u << '\t' << v << '\n';
  }
  {
    auto out = open_out(dir / "features.tsv");
    char buf[32];
    for (std::size_t i = 0; i < ds.num_nodes(); ++i) {
      out << i;
      for (double x : ds.features.row(i)) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << '\t' << buf;
      }
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "labels.tsv");
    for (std::size_t i = 0; i < ds.num_nodes(); ++i) out << i << '\t' << ds.labels.y[i] << '\n';
    if (!out) throw IoError((dir / "labels.tsv").string() + ": write failed");
  }
}

void SynthSpec::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (sizes.empty()) throw InputError("synthetic spec needs at least one block size");
  for (std::size_t s : sizes) {
    if (s == 0) throw InputError("block sizes must be >= 1");
  }
  if (kind == SynthKind::kBipartite && sizes.size() != 2) throw InputError("bipartite spec needs two side sizes");
  if (kind == SynthKind::kPlantedPartition && sizes.size() < 2) {
    throw InputError("planted partition needs at least two classes");
  }
  if (!prob(p_in) || !prob(p_out)) throw InputError("edge probabilities must lie in [0, 1]");
  if (num_features == 0) throw InputError("num_features must be >= 1");
  if (!(sigma >= 0.0)) throw InputError("sigma must be non-negative");
}

Dataset generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset ds;
  ds.name = spec.name;
  const std::size_t classes = spec.sizes.size();
  std::vector<std::uint32_t> y;
  for (std::size_t c = 0; c < classes; ++c) y.insert(y.end(), spec.sizes[c], static_cast<std::uint32_t>(c));
  const std::size_t base = y.size();

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 0; i < base; ++i) {
    for (std::size_t j = i + 1; j < base; ++j) {
      double p;
      if (spec.kind == SynthKind::kBipartite) {
        p = y[i] == y[j] ? 0.0 : spec.p_out;
      } else {
        p = y[i] == y[j] ? spec.p_in : spec.p_out;
      }
      // Draw for every pair so the stream does not depend on p.
      if (rng.uniform() < p) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
  }
  if (spec.kind == SynthKind::kPlantedPartition) {
    for (std::size_t h = 0; h < spec.hubs; ++h) {
      const auto id = static_cast<NodeId>(base + h);
      y.push_back(static_cast<std::uint32_t>(rng.below(classes)));
      for (std::size_t e = 0; e < spec.hub_degree; ++e) {
        edges.emplace_back(id, static_cast<NodeId>(rng.below(base)));
      }
    }
  }
  const std::size_t n = y.size();
  ds.graph = build_graph(edges, n);
  ds.labels.y = std::move(y);
  ds.labels.num_classes = classes;

  ds.features = Tensor(n, spec.num_features);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < spec.num_features; ++d) {
      const double mean = d % classes == ds.labels.y[i] ? spec.mean_scale : 0.0;
      ds.features(i, d) = mean + spec.sigma * rng.normal();
    }
  }
  return ds;
}

}  // namespace nhg
