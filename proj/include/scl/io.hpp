// On-disk formats.
//
//   vocabulary   one `term<TAB>index<TAB>df_total` line per term, sorted by
//                index
//   pivot set    `#` header lines (strategy, seed, p, candidate_min_df,
//                truncated), then one `rank<TAB>index<TAB>term<TAB>score`
//                line per pivot; rank is 1-based, score is `-` for the
//                random strategy
//   checkpoint   versioned text layout: `key value` lines followed by
//                `tensor <name> <rows> <cols>` blocks, one row per line
//
// Doubles are written as shortest-round-trip or hex floats via
// std::to_chars, so every format is locale-independent and byte-stable on a
// given platform; re-reading reproduces exact values.
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scl/error.hpp"
#include "scl/featurize.hpp"
#include "scl/models.hpp"
#include "scl/pivot.hpp"

namespace scl {

// ---------------------------------------------------------------------------
// Hashing and number formatting
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_parse("cannot open file for hashing: ", path);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a64({buf, static_cast<std::size_t>(in.gcount())}, h);
  return h;
}

// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Hex float; exact and compact, used inside checkpoints.
inline std::string format_double_hex(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view text, std::chars_format fmt = std::chars_format::general) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v, fmt);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
    fail_parse("bad float literal '", std::string(text), "'");
  return v;
}

inline std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
    fail_parse("bad integer literal '", std::string(text), "'");
  return v;
}

namespace detail {

inline std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_parse("cannot open file for writing: ", path);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

inline void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  for (std::size_t i = 0; i < vocab.size(); ++i)
    out << vocab.terms[i] << '\t' << i << '\t' << vocab.df_total[i] << '\n';
}

// Note: per-domain document frequencies are not stored; rebuild them with
// count_domain_dfs against the corpora when candidate selection is needed.
inline Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_parse("cannot open vocabulary file: ", path);
  Vocabulary vocab;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = detail::split_on(line, '\t');
    if (parts.size() != 3) fail_parse(path, ":", lineno, ": expected term<TAB>index<TAB>df");
    if (parse_u64(parts[1]) != vocab.terms.size())
      fail_parse(path, ":", lineno, ": indices out of order");
    vocab.terms.emplace_back(parts[0]);
    vocab.df_total.push_back(parse_u64(parts[2]));
  }
  if (vocab.terms.empty()) fail_parse(path, ": empty vocabulary file");
  vocab.index.reserve(vocab.terms.size());
  for (std::uint32_t i = 0; i < vocab.terms.size(); ++i) vocab.index.emplace(vocab.terms[i], i);
  return vocab;
}

// ---------------------------------------------------------------------------
// Pivot sets
// ---------------------------------------------------------------------------

inline void save_pivots(const PivotSet& set, const Vocabulary& vocab, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << "# sclkit-pivots v1\n";
  out << "# strategy " << to_string(set.strategy) << '\n';
  out << "# seed " << set.seed << '\n';
  out << "# p " << set.requested << '\n';
  out << "# candidate_min_df " << set.candidate_min_df << '\n';
  out << "# truncated " << (set.truncated ? 1 : 0) << '\n';
  for (std::size_t r = 0; r < set.indices.size(); ++r) {
    out << (r + 1) << '\t' << set.indices[r] << '\t' << vocab.terms.at(set.indices[r]) << '\t';
    if (set.scores.empty())
      out << '-';
    else
      out << format_double(set.scores[r]);
    out << '\n';
  }
}

struct LoadedPivots {
  PivotSet set;
  std::vector<std::string> terms;  // parallel to set.indices
};

inline LoadedPivots load_pivots(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_parse("cannot open pivot file: ", path);
  LoadedPivots out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream header(line.substr(1));
      std::string key, value;
      header >> key >> value;
      if (key == "strategy") out.set.strategy = pivot_strategy_from(value);
      else if (key == "seed") out.set.seed = parse_u64(value);
      else if (key == "p") out.set.requested = parse_u64(value);
      else if (key == "candidate_min_df") out.set.candidate_min_df = parse_u64(value);
      else if (key == "truncated") out.set.truncated = value == "1";
      continue;
    }
    const auto parts = detail::split_on(line, '\t');
    if (parts.size() != 4)
      fail_parse(path, ":", lineno, ": expected rank<TAB>index<TAB>term<TAB>score");
    out.set.indices.push_back(static_cast<std::uint32_t>(parse_u64(parts[1])));
    out.terms.emplace_back(parts[2]);
    if (parts[3] != "-") out.set.scores.push_back(parse_double(parts[3]));
  }
  if (out.set.indices.empty()) fail_parse(path, ": pivot file has no pivots");
  if (out.set.requested == 0) out.set.requested = out.set.indices.size();
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace detail {

inline void write_tensor(std::ofstream& out, const char* name, const DenseMatrix& m) {
  out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double_hex(m(r, c));
    }
    out << '\n';
  }
}

inline void write_vector(std::ofstream& out, const char* name, const std::vector<double>& v) {
  DenseMatrix m(1, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
  write_tensor(out, name, m);
}

class CheckpointReader {
 public:
  explicit CheckpointReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) fail_parse("cannot open checkpoint: ", path);
  }

  std::string expect_key(const std::string& key) {
    const auto [k, v] = next_pair();
    if (k != key) fail_parse(path_, ": expected '", key, "', found '", k, "'");
    return v;
  }

  std::pair<std::string, std::string> next_pair() {
    std::string line = next_line();
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) return {line, ""};
    return {line.substr(0, sp), line.substr(sp + 1)};
  }

  DenseMatrix expect_tensor(const std::string& name) {
    std::string header = next_line();
    std::istringstream h(header);
    std::string tag, got;
    std::size_t rows = 0, cols = 0;
    h >> tag >> got >> rows >> cols;
    if (tag != "tensor" || got != name)
      fail_parse(path_, ": expected tensor '", name, "', found '", header, "'");
    DenseMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string line = next_line();
      std::size_t start = 0, c = 0;
      while (start <= line.size() && c < cols) {
        std::size_t end = line.find(' ', start);
        if (end == std::string::npos) end = line.size();
        m(r, c++) = parse_double(std::string_view(line).substr(start, end - start),
                                 std::chars_format::hex);
        start = end + 1;
      }
      if (c != cols) fail_parse(path_, ": tensor '", name, "' row ", r, " is short");
    }
    return m;
  }

  std::vector<double> expect_vector(const std::string& name) {
    const DenseMatrix m = expect_tensor(name);
    return m.data();
  }

 private:
  std::string next_line() {
    std::string line;
    if (!std::getline(in_, line)) fail_parse(path_, ": unexpected end of checkpoint");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  std::string path_;
  std::ifstream in_;
};

inline void write_pivot_indices(std::ofstream& out, const PivotSet& set) {
  out << "pivot_strategy " << to_string(set.strategy) << '\n';
  out << "pivot_indices";
  for (std::uint32_t i : set.indices) out << ' ' << i;
  out << '\n';
}

inline PivotSet read_pivot_indices(CheckpointReader& reader) {
  PivotSet set;
  set.strategy = pivot_strategy_from(reader.expect_key("pivot_strategy"));
  std::istringstream ids(reader.expect_key("pivot_indices"));
  std::uint64_t v = 0;
  while (ids >> v) set.indices.push_back(static_cast<std::uint32_t>(v));
  set.requested = set.indices.size();
  return set;
}

inline void write_logreg(std::ofstream& out, const LogRegModel& m) {
  out << "sparse_dim " << m.sparse_dim << '\n';
  out << "dense_dim " << m.dense_dim << '\n';
  out << "clf_bias " << (m.has_bias ? 1 : 0) << '\n';
  out << "clf_b " << format_double_hex(m.b) << '\n';
  out << "clf_best_epoch " << m.best_epoch << '\n';
  write_vector(out, "clf_w", m.w);
}

inline LogRegModel read_logreg(CheckpointReader& reader) {
  LogRegModel m;
  m.sparse_dim = parse_u64(reader.expect_key("sparse_dim"));
  m.dense_dim = parse_u64(reader.expect_key("dense_dim"));
  m.has_bias = reader.expect_key("clf_bias") == "1";
  m.b = parse_double(reader.expect_key("clf_b"), std::chars_format::hex);
  m.best_epoch = parse_u64(reader.expect_key("clf_best_epoch"));
  m.w = reader.expect_vector("clf_w");
  if (m.w.size() != m.sparse_dim + m.dense_dim) fail_parse("checkpoint: clf_w size mismatch");
  return m;
}

inline void write_joint_params(std::ofstream& out, const JointModelParams& p) {
  out << "n " << p.n << '\n';
  out << "d " << p.d << '\n';
  out << "p " << p.p << '\n';
  out << "activation " << to_string(p.hidden_activation) << '\n';
  out << "bias " << (p.has_bias ? 1 : 0) << '\n';
  write_tensor(out, "w_h", p.w_h);
  write_vector(out, "w_t", p.w_t);
  write_tensor(out, "w_p", p.w_p);
  if (p.has_bias) {
    write_vector(out, "b_h", p.b_h);
    out << "b_t " << format_double_hex(p.b_t) << '\n';
    write_vector(out, "b_p", p.b_p);
  }
}

inline JointModelParams read_joint_params(CheckpointReader& reader) {
  JointModelParams p;
  p.n = parse_u64(reader.expect_key("n"));
  p.d = parse_u64(reader.expect_key("d"));
  p.p = parse_u64(reader.expect_key("p"));
  const std::string act = reader.expect_key("activation");
  p.hidden_activation = act == "relu" ? Activation::relu : Activation::sigmoid;
  p.has_bias = reader.expect_key("bias") == "1";
  p.w_h = reader.expect_tensor("w_h");
  p.w_t = reader.expect_vector("w_t");
  p.w_p = reader.expect_tensor("w_p");
  if (p.has_bias) {
    p.b_h = reader.expect_vector("b_h");
    p.b_t = parse_double(reader.expect_key("b_t"), std::chars_format::hex);
    p.b_p = reader.expect_vector("b_p");
  }
  if (p.w_h.rows() != p.n || p.w_h.cols() != p.d || p.w_t.size() != p.d ||
      p.w_p.rows() != p.p || p.w_p.cols() != p.d)
    fail_parse("checkpoint: parameter shapes are inconsistent");
  return p;
}

}  // namespace detail

constexpr const char* kCheckpointMagic = "sclkit-model v1";

inline void save_joint_model(const TrainedJointModel& model, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << kCheckpointMagic << '\n';
  out << "kind joint\n";
  out << "seed " << model.config.seed << '\n';
  out << "mask_pivots " << (model.config.mask_pivots_in_input ? 1 : 0) << '\n';
  out << "best_epoch " << model.best_epoch << '\n';
  detail::write_pivot_indices(out, model.pivots);
  detail::write_joint_params(out, model.params);
  out << "end\n";
}

inline void save_logreg_model(const LogRegModel& model, std::uint64_t seed,
                              const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << kCheckpointMagic << '\n';
  out << "kind logreg\n";
  out << "seed " << seed << '\n';
  detail::write_logreg(out, model);
  out << "end\n";
}

inline void save_aescl_model(const AesclModel& model, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << kCheckpointMagic << '\n';
  out << "kind aescl\n";
  out << "seed " << model.config.seed << '\n';
  out << "rep_best_epoch " << model.rep_best_epoch << '\n';
  detail::write_pivot_indices(out, model.pivots);
  detail::write_joint_params(out, model.rep);
  detail::write_logreg(out, model.clf);
  out << "end\n";
}

inline void save_classic_model(const ClassicSclModel& model, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << kCheckpointMagic << '\n';
  out << "kind classic_scl\n";
  out << "seed " << model.config.seed << '\n';
  out << "input_dim " << model.clf.sparse_dim << '\n';
  detail::write_pivot_indices(out, model.pivots);
  std::vector<double> sv = model.singular_values;
  detail::write_vector(out, "singular_values", sv);
  detail::write_tensor(out, "theta", model.theta);
  detail::write_logreg(out, model.clf);
  out << "end\n";
}

// A loaded model of any kind, dispatched by the CLI `eval` command.
struct LoadedModel {
  std::string kind;
  TrainedJointModel joint;
  AesclModel aescl;
  ClassicSclModel classic;
  LogRegModel logreg;
  std::uint64_t seed = 0;
};

inline LoadedModel load_model(const std::string& path) {
  detail::CheckpointReader reader(path);
  if (reader.expect_key("sclkit-model") != "v1")
    fail_parse(path, ": unsupported checkpoint version");
  LoadedModel out;
  out.kind = reader.expect_key("kind");
  out.seed = parse_u64(reader.expect_key("seed"));
  if (out.kind == "joint") {
    out.joint.config.seed = out.seed;
    out.joint.config.mask_pivots_in_input = reader.expect_key("mask_pivots") == "1";
    out.joint.best_epoch = parse_u64(reader.expect_key("best_epoch"));
    out.joint.pivots = detail::read_pivot_indices(reader);
    out.joint.params = detail::read_joint_params(reader);
  } else if (out.kind == "logreg") {
    out.logreg = detail::read_logreg(reader);
  } else if (out.kind == "aescl") {
    out.aescl.config.seed = out.seed;
    out.aescl.rep_best_epoch = parse_u64(reader.expect_key("rep_best_epoch"));
    out.aescl.pivots = detail::read_pivot_indices(reader);
    out.aescl.rep = detail::read_joint_params(reader);
    out.aescl.clf = detail::read_logreg(reader);
    out.aescl.config.aescl_hidden = out.aescl.rep.d;
  } else if (out.kind == "classic_scl") {
    const std::size_t n = parse_u64(reader.expect_key("input_dim"));
    out.classic.config.seed = out.seed;
    out.classic.pivots = detail::read_pivot_indices(reader);
    out.classic.singular_values = reader.expect_vector("singular_values");
    out.classic.theta = reader.expect_tensor("theta");
    out.classic.clf = detail::read_logreg(reader);
    const PivotIndexer indexer(out.classic.pivots);
    for (std::uint32_t j = 0; j < n; ++j)
      if (!indexer.is_pivot(j)) out.classic.nonpivot_features.push_back(j);
  } else {
    fail_parse(path, ": unknown model kind '", out.kind, "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Misc writers
// ---------------------------------------------------------------------------

// TSV export, used for fixtures and synthetic corpora.
inline void write_tsv(const Corpus& corpus, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  for (const Document& doc : corpus.documents) {
    if (corpus.labeled) out << *doc.label << '\t';
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) out << ' ';
      out << doc.tokens[i];
    }
    out << '\n';
  }
}

// Canonical key=value fingerprint of a training config, seed excluded (the
// seed is reported separately so one config hash covers a whole seed sweep).
inline std::string config_fingerprint(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "d=" << cfg.d << ";p=" << cfg.p << ";lambda=" << format_double(cfg.lambda)
      << ";rho=" << format_double(cfg.rho) << ";lr=" << format_double(cfg.lr)
      << ";epochs=" << cfg.epochs << ";batch_size=" << cfg.batch_size
      << ";mask_pivots=" << (cfg.mask_pivots_in_input ? 1 : 0)
      << ";val_metric=" << (cfg.validation_metric == ValidationMetric::task_bce ? "task_bce" : "joint")
      << ";activation=" << to_string(cfg.hidden_activation)
      << ";bias=" << (cfg.use_bias ? 1 : 0)
      << ";adam=" << format_double(cfg.adam_beta1) << ',' << format_double(cfg.adam_beta2) << ','
      << format_double(cfg.adam_epsilon) << ";aescl_hidden=" << cfg.aescl_hidden
      << ";aescl_act=" << to_string(cfg.aescl_activation) << ";classic_k=" << cfg.classic_k
      << ";classic_predictor_epochs=" << cfg.classic_predictor_epochs;
  return out.str();
}

}  // namespace scl
