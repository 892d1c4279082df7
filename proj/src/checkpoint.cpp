#include "nhgcn/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nhgcn/error.hpp"
#include "nhgcn/export.hpp"

namespace nhg {

namespace {

constexpr const char* kMagic = "nhgcn-checkpoint 1";

[[noreturn]] void malformed(const std::filesystem::path& file, std::size_t line, const std::string& what) {
  throw IoError(file.string() + ":" + std::to_string(line) + ": malformed checkpoint: " + what);
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file) {
  std::ostringstream os;
  os << kMagic << "\n";
  os << "dataset_name " << ckpt.dataset_name << "\n";
  os << "in_features " << ckpt.config.model.in_features << "\n";
  os << "num_classes " << ckpt.config.model.num_classes << "\n";
  os << "config_begin\n" << echo_config(ckpt.config) << "config_end\n";
  char buf[40];
  for (const auto& [name, t] : ckpt.params) {
    os << "param " << name << ' ' << t.rows << ' ' << t.cols << "\n";
    for (std::size_t r = 0; r < t.rows; ++r) {
      for (std::size_t c = 0; c < t.cols; ++c) {
        std::snprintf(buf, sizeof buf, "%a", t(r, c));
        os << (c ? " " : "") << buf;
      }
      os << "\n";
    }
  }
  if (ckpt.masks) {
    os << "mask_low " << ckpt.masks->low.size() << "\n";
    for (std::uint8_t b : ckpt.masks->low) os << (b ? '1' : '0');
    os << "\n";
  }
  os << "end\n";
  write_text(file, os.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError(file.string() + ": cannot open checkpoint");
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) malformed(file, lineno, "unexpected end of file");
    ++lineno;
    return line;
  };
  if (next() != kMagic) malformed(file, lineno, "bad header");

  Checkpoint ck;
  std::size_t in_features = 0;
  std::size_t num_classes = 0;
  std::string config_text;
  bool ended = false;
  while (!ended) {
    std::istringstream ls(next());
    std::string tag;
    ls >> tag;
    if (tag == "dataset_name") {
      std::getline(ls >> std::ws, ck.dataset_name);
    } else if (tag == "in_features") {
      if (!(ls >> in_features)) malformed(file, lineno, "in_features");
    } else if (tag == "num_classes") {
      if (!(ls >> num_classes)) malformed(file, lineno, "num_classes");
    } else if (tag == "config_begin") {
      while (next() != "config_end") config_text += line + "\n";
    } else if (tag == "param") {
      std::string name;
      std::size_t rows = 0;
      std::size_t cols = 0;
      if (!(ls >> name >> rows >> cols)) malformed(file, lineno, "param header");
      Tensor t(rows, cols);
      for (std::size_t r = 0; r < rows; ++r) {
        std::istringstream vs(next());
        std::string tok;
        for (std::size_t c = 0; c < cols; ++c) {
          if (!(vs >> tok)) malformed(file, lineno, "short parameter row");
          char* endp = nullptr;
          t(r, c) = std::strtod(tok.c_str(), &endp);
          if (*endp != '\0') malformed(file, lineno, "bad number '" + tok + "'");
        }
      }
      try {
        ck.params.add(name, std::move(t));
      } catch (const Error& e) {
        malformed(file, lineno, e.what());
      }
    } else if (tag == "mask_low") {
      std::size_t n = 0;
      if (!(ls >> n)) malformed(file, lineno, "mask_low header");
      const std::string& bits = next();
      if (bits.size() != n) malformed(file, lineno, "mask length");
      MaskPair m;
      for (char b : bits) {
        if (b != '0' && b != '1') malformed(file, lineno, "mask bit");
        m.low.push_back(b == '1');
        m.high.push_back(b == '0');
      }
      ck.masks = std::move(m);
    } else if (tag == "end") {
      ended = true;
    } else {
      malformed(file, lineno, "unknown record '" + tag + "'");
    }
  }
  try {
    ck.config = resolve_config(parse_settings(config_text));
  } catch (const Error& e) {
    throw IoError(file.string() + ": checkpoint config: " + e.what());
  }
  ck.config.model.in_features = in_features;
  ck.config.model.num_classes = num_classes;
  if (ck.masks) ck.masks->threshold = ck.config.model.threshold();
  return ck;
}

}  // namespace nhg
