// Multi-seed, multi-pair experiment runner and report emission.
//
// For every ordered (source, target) pair the runner: splits the labeled
// source corpus (1600/400 by default), builds a vocabulary over that pair's
// data only (source labeled + source/target unlabeled), selects pivots per
// system strategy, trains, and evaluates on the entire labeled target set.
// Each iteration derives weight init, split permutation and batch shuffles
// from its run seed. The oracle system selects pivots by MI against target
// labels but its training sees only source data: the target-labeled matrix
// flows into select_pivots and accuracy, never into a train_* call.
//
// Runs are independent, so they may execute on a small worker pool; results
// land in preallocated slots and every report is reduced in canonical
// (pair, system, seed) order regardless of completion order.
#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "scl/corpus.hpp"
#include "scl/error.hpp"
#include "scl/featurize.hpp"
#include "scl/io.hpp"
#include "scl/models.hpp"
#include "scl/pivot.hpp"
#include "scl/stats.hpp"

namespace scl {

enum class SystemKind { logreg, aescl, classic_scl, joint_mi, joint_oracle, joint_random };

inline const char* to_string(SystemKind s) {
  switch (s) {
    case SystemKind::logreg: return "logreg";
    case SystemKind::aescl: return "aescl";
    case SystemKind::classic_scl: return "classic_scl";
    case SystemKind::joint_mi: return "joint_mi";
    case SystemKind::joint_oracle: return "joint_oracle";
    case SystemKind::joint_random: return "joint_random";
  }
  return "?";
}

inline SystemKind system_from(const std::string& name) {
  if (name == "logreg") return SystemKind::logreg;
  if (name == "aescl") return SystemKind::aescl;
  if (name == "classic_scl" || name == "classic") return SystemKind::classic_scl;
  if (name == "joint_mi" || name == "joint") return SystemKind::joint_mi;
  if (name == "joint_oracle" || name == "oracle") return SystemKind::joint_oracle;
  if (name == "joint_random" || name == "random") return SystemKind::joint_random;
  fail_arg("unknown system '", name, "'");
}

struct RunResult {
  std::string source, target;
  SystemKind system = SystemKind::logreg;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  std::size_t best_epoch = 0;
  std::string config_hash;
  std::string manifest;  // key=value lines sufficient to replay the run
};

struct WelchRow {
  std::string source, target;
  SystemKind candidate, baseline;
  WelchResult stats;
};

struct BenchmarkConfig {
  std::vector<SystemKind> systems = {SystemKind::logreg, SystemKind::aescl,
                                     SystemKind::joint_mi};
  std::size_t seeds = 10;
  TrainConfig train;
  SplitSpec split{1600, 400, 0};
  std::size_t vocab_min_df = 5;
  std::size_t pivot_min_df = 10;
  bool freeze_split = false;  // keep one split across iterations
  std::size_t jobs = 1;
  // candidate > baseline comparisons; empty = sensible defaults from systems
  std::vector<std::pair<SystemKind, SystemKind>> comparisons;
  // empty = all ordered pairs
  std::vector<std::pair<std::string, std::string>> pair_filter;
};

struct BenchmarkReport {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<SystemKind> systems;
  std::size_t seeds = 0;
  std::vector<RunResult> results;  // canonical (pair, system, seed) order
  std::vector<WelchRow> welch;

  std::vector<double> accuracies(const std::pair<std::string, std::string>& pair,
                                 SystemKind system) const {
    std::vector<double> out;
    for (const RunResult& r : results)
      if (r.source == pair.first && r.target == pair.second && r.system == system)
        out.push_back(r.accuracy);
    return out;
  }

  double mean_accuracy(const std::pair<std::string, std::string>& pair,
                       SystemKind system) const {
    const std::vector<double> acc = accuracies(pair, system);
    double s = 0.0;
    for (double a : acc) s += a;
    return acc.empty() ? 0.0 : s / static_cast<double>(acc.size());
  }

  double system_average(SystemKind system) const {
    double s = 0.0;
    for (const auto& pair : pairs) s += mean_accuracy(pair, system);
    return pairs.empty() ? 0.0 : s / static_cast<double>(pairs.size());
  }
};

namespace detail {

inline void parallel_for(std::size_t count, std::size_t jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t workers = std::min(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::uint64_t corpus_fingerprint(const Corpus& corpus) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Document& doc : corpus.documents) {
    for (const std::string& tok : doc.tokens) {
      h = fnv1a64(tok, h);
      h = fnv1a64("\x1f", h);
    }
    h = fnv1a64(doc.label ? (*doc.label ? "+\n" : "-\n") : "?\n", h);
  }
  return h;
}

struct PairContext {
  std::string source, target;
  Vocabulary vocab;
  std::vector<std::uint32_t> candidates;
  Corpus source_labeled;     // domain tag normalized to the DomainData name
  DesignMatrix unlabeled;    // source unlabeled + target unlabeled
  DesignMatrix target_eval;  // entire labeled target set
  std::uint64_t data_hash = 0;
};

// rng streams private to the runner
constexpr std::uint64_t kSplitStream = 31;
constexpr std::uint64_t kRandomPivotStream = 32;

inline RunResult run_single(const PairContext& ctx, SystemKind system, std::uint64_t run_seed,
                            const BenchmarkConfig& bc) {
  TrainConfig cfg = bc.train;
  cfg.seed = run_seed;

  SplitSpec split_spec = bc.split;
  split_spec.seed = rng::mix(bc.freeze_split ? bc.train.seed : run_seed, kSplitStream);
  auto [train_corpus, val_corpus] = split(ctx.source_labeled, split_spec);
  const DesignMatrix train_m = vectorize_corpus(train_corpus, ctx.vocab);
  const DesignMatrix val_m = vectorize_corpus(val_corpus, ctx.vocab);

  PivotSet pivots;
  switch (system) {
    case SystemKind::logreg:
      break;
    case SystemKind::joint_oracle:
      pivots = select_pivots(ctx.target_eval, ctx.candidates, cfg.p, PivotStrategy::mi_oracle,
                             run_seed, bc.pivot_min_df);
      break;
    case SystemKind::joint_random:
      pivots = select_pivots(train_m, ctx.candidates, cfg.p, PivotStrategy::random,
                             rng::mix(run_seed, kRandomPivotStream), bc.pivot_min_df);
      break;
    default:
      pivots = select_pivots(train_m, ctx.candidates, cfg.p, PivotStrategy::mi_source, run_seed,
                             bc.pivot_min_df);
      break;
  }

  RunResult result;
  result.source = ctx.source;
  result.target = ctx.target;
  result.system = system;
  result.seed = run_seed;
  result.config_hash = hex64(fnv1a64(config_fingerprint(cfg)));

  std::vector<int> predictions;
  switch (system) {
    case SystemKind::logreg: {
      const LogRegModel model = train_logreg(train_m, val_m, cfg);
      result.best_epoch = model.best_epoch;
      predictions = predict_logreg_labels(model, ctx.target_eval);
      break;
    }
    case SystemKind::aescl: {
      const AesclModel model = train_aescl(train_m, val_m, ctx.unlabeled, pivots, cfg);
      result.best_epoch = model.clf.best_epoch;
      predictions = predict_aescl_labels(model, ctx.target_eval);
      break;
    }
    case SystemKind::classic_scl: {
      const std::size_t k = std::min(cfg.classic_k, pivots.size());
      const ClassicSclModel model = train_classic_scl(train_m, ctx.unlabeled, pivots, k, cfg);
      result.best_epoch = model.clf.best_epoch;
      predictions = predict_classic_scl_labels(model, ctx.target_eval);
      break;
    }
    default: {  // joint_mi / joint_oracle / joint_random
      const TrainedJointModel model = train_joint(train_m, val_m, ctx.unlabeled, pivots, cfg);
      result.best_epoch = model.best_epoch;
      predictions = predict_joint_labels(model, ctx.target_eval);
      break;
    }
  }
  result.accuracy = accuracy(predictions, *ctx.target_eval.labels);

  std::ostringstream manifest;
  manifest << "pair=" << ctx.source << "->" << ctx.target << '\n'
           << "system=" << to_string(system) << '\n'
           << "seed=" << run_seed << '\n'
           << "split=" << split_spec.train_size << '/' << split_spec.validation_size << '@'
           << split_spec.seed << '\n'
           << "vocab_min_df=" << bc.vocab_min_df << '\n'
           << "pivot_min_df=" << bc.pivot_min_df << '\n'
           << "vocab_size=" << ctx.vocab.size() << '\n'
           << "candidates=" << ctx.candidates.size() << '\n'
           << "pivot_strategy=" << to_string(pivots.strategy) << '\n'
           << "pivot_count=" << pivots.size() << '\n'
           << "data_hash=" << hex64(ctx.data_hash) << '\n'
           << "config=" << config_fingerprint(cfg) << '\n';
  result.manifest = manifest.str();
  return result;
}

}  // namespace detail

inline BenchmarkReport run_benchmark(const std::vector<DomainData>& domains,
                                     const BenchmarkConfig& bc) {
  if (domains.size() < 2) fail_arg("run_benchmark: need at least two domains");
  if (bc.systems.empty()) fail_arg("run_benchmark: no systems requested");
  if (bc.seeds == 0) fail_arg("run_benchmark: seeds must be >= 1");
  for (const DomainData& d : domains) {
    if (d.labeled.documents.empty())
      fail_arg("run_benchmark: domain '", d.name, "' has no labeled data");
    if (!d.labeled.labeled) fail_arg("run_benchmark: domain '", d.name, "' labeled corpus is unlabeled");
    if (d.labeled.size() < bc.split.train_size + bc.split.validation_size)
      fail_arg("run_benchmark: domain '", d.name, "' labeled corpus smaller than the split");
  }

  BenchmarkReport report;
  report.systems = bc.systems;
  report.seeds = bc.seeds;
  if (bc.pair_filter.empty()) {
    for (const DomainData& s : domains)
      for (const DomainData& t : domains)
        if (s.name != t.name) report.pairs.push_back({s.name, t.name});
  } else {
    for (const auto& pair : bc.pair_filter) {
      bool src = false, tgt = false;
      for (const DomainData& d : domains) {
        src |= d.name == pair.first;
        tgt |= d.name == pair.second;
      }
      if (!src || !tgt) fail_arg("run_benchmark: pair ", pair.first, "->", pair.second,
                                 " references an unknown domain");
      report.pairs.push_back(pair);
    }
  }

  const auto domain_by_name = [&](const std::string& name) -> const DomainData& {
    for (const DomainData& d : domains)
      if (d.name == name) return d;
    fail_arg("run_benchmark: unknown domain '", name, "'");
  };

  // pair contexts are seed-independent; build them up front
  std::vector<detail::PairContext> contexts(report.pairs.size());
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const DomainData& src = domain_by_name(report.pairs[i].first);
    const DomainData& tgt = domain_by_name(report.pairs[i].second);
    detail::PairContext& ctx = contexts[i];
    ctx.source = src.name;
    ctx.target = tgt.name;

    ctx.source_labeled = src.labeled;
    ctx.source_labeled.domain = src.name;
    Corpus src_unlabeled = src.unlabeled;
    src_unlabeled.domain = src.name;
    Corpus tgt_unlabeled = tgt.unlabeled;
    tgt_unlabeled.domain = tgt.name;
    ctx.vocab =
        build_vocabulary({&ctx.source_labeled, &src_unlabeled, &tgt_unlabeled}, bc.vocab_min_df);
    ctx.candidates = candidate_features(ctx.vocab, src.name, tgt.name, bc.pivot_min_df);

    DesignMatrix unlabeled = vectorize_corpus(src_unlabeled, ctx.vocab);
    const DesignMatrix tgt_m = vectorize_corpus(tgt_unlabeled, ctx.vocab);
    unlabeled.labels.reset();
    for (const SparseVector& row : tgt_m.rows) unlabeled.rows.push_back(row);
    ctx.unlabeled = std::move(unlabeled);
    ctx.target_eval = vectorize_corpus(tgt.labeled, ctx.vocab);
    if (!ctx.target_eval.labels.has_value())
      fail_arg("run_benchmark: target domain '", tgt.name, "' evaluation corpus has no labels");

    std::uint64_t h = detail::corpus_fingerprint(src.labeled);
    h = fnv1a64("|", h);
    h = fnv1a64(hex64(detail::corpus_fingerprint(src_unlabeled)), h);
    h = fnv1a64(hex64(detail::corpus_fingerprint(tgt_unlabeled)), h);
    h = fnv1a64(hex64(detail::corpus_fingerprint(tgt.labeled)), h);
    ctx.data_hash = h;
  }

  struct Task {
    std::size_t pair, system, seed;
  };
  std::vector<Task> tasks;
  for (std::size_t pi = 0; pi < report.pairs.size(); ++pi)
    for (std::size_t si = 0; si < bc.systems.size(); ++si)
      for (std::size_t k = 0; k < bc.seeds; ++k) tasks.push_back({pi, si, k});

  report.results.resize(tasks.size());
  detail::parallel_for(tasks.size(), bc.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    report.results[i] = detail::run_single(contexts[t.pair], bc.systems[t.system],
                                           bc.train.seed + t.seed, bc);
  });

  // Welch comparisons (candidate > baseline), per pair across seeds
  std::vector<std::pair<SystemKind, SystemKind>> comparisons = bc.comparisons;
  if (comparisons.empty()) {
    const auto has = [&](SystemKind s) {
      for (SystemKind k : bc.systems)
        if (k == s) return true;
      return false;
    };
    const std::pair<SystemKind, SystemKind> defaults[] = {
        {SystemKind::joint_mi, SystemKind::aescl},
        {SystemKind::joint_mi, SystemKind::logreg},
        {SystemKind::joint_oracle, SystemKind::joint_mi},
        {SystemKind::aescl, SystemKind::logreg},
    };
    for (const auto& c : defaults)
      if (has(c.first) && has(c.second)) comparisons.push_back(c);
  }
  if (bc.seeds >= 2) {
    for (const auto& pair : report.pairs) {
      for (const auto& [cand, base] : comparisons) {
        const std::vector<double> a = report.accuracies(pair, cand);
        const std::vector<double> b = report.accuracies(pair, base);
        if (a.size() < 2 || b.size() < 2) continue;
        WelchRow row;
        row.source = pair.first;
        row.target = pair.second;
        row.candidate = cand;
        row.baseline = base;
        try {
          row.stats = welch_one_tailed(a, b);
        } catch (const InvalidArgument&) {
          continue;  // degenerate comparison (identical constant samples differing in mean)
        }
        report.welch.push_back(std::move(row));
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

constexpr const char* kResultsCsvHeader = "source,target,system,seed,accuracy,best_epoch,config_hash";

inline void emit_csv(const BenchmarkReport& report, std::ostream& out) {
  out << kResultsCsvHeader << '\n';
  for (const RunResult& r : report.results)
    out << r.source << ',' << r.target << ',' << to_string(r.system) << ',' << r.seed << ','
        << format_double(r.accuracy) << ',' << r.best_epoch << ',' << r.config_hash << '\n';
}

inline void emit_welch_csv(const BenchmarkReport& report, std::ostream& out) {
  out << "source,target,candidate,baseline,t,df,p_one_tailed\n";
  for (const WelchRow& w : report.welch)
    out << w.source << ',' << w.target << ',' << to_string(w.candidate) << ','
        << to_string(w.baseline) << ',' << format_double(w.stats.t_statistic) << ','
        << format_double(w.stats.degrees_of_freedom) << ','
        << format_double(w.stats.p_value_one_tailed) << '\n';
}

// Table-2-shaped markdown: one row per pair, one column per system, averages
// row, '*' on a cell whose system beats its configured baseline at p < 0.05.
inline void emit_markdown(const BenchmarkReport& report, std::ostream& out) {
  out << "| S->T |";
  for (SystemKind s : report.systems) out << ' ' << to_string(s) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < report.systems.size(); ++i) out << "---|";
  out << '\n';

  const auto significant = [&](const std::pair<std::string, std::string>& pair, SystemKind s) {
    for (const WelchRow& w : report.welch)
      if (w.source == pair.first && w.target == pair.second && w.candidate == s &&
          w.stats.p_value_one_tailed < 0.05)
        return true;
    return false;
  };
  char buf[32];
  for (const auto& pair : report.pairs) {
    out << "| " << pair.first << "->" << pair.second << " |";
    for (SystemKind s : report.systems) {
      std::snprintf(buf, sizeof buf, "%.3f", report.mean_accuracy(pair, s));
      out << ' ' << buf << (significant(pair, s) ? "*" : "") << " |";
    }
    out << '\n';
  }
  if (!report.pairs.empty()) {
    out << "| Ave. |";
    for (SystemKind s : report.systems) {
      std::snprintf(buf, sizeof buf, "%.3f", report.system_average(s));
      out << ' ' << buf << " |";
    }
    out << '\n';
  }
  if (!report.welch.empty())
    out << "\n`*` one-tailed Welch p < 0.05 against the configured baseline.\n";
}

inline void write_overlap_report(const OverlapReport& report, std::ostream& out) {
  out << "shared " << report.shared.size() << '\n';
  out << "a_only " << report.a_only.size() << '\n';
  out << "b_only " << report.b_only.size() << '\n';
  for (const std::string& t : report.shared) out << "shared\t" << t << '\n';
  for (const std::string& t : report.a_only) out << "a_only\t" << t << '\n';
  for (const std::string& t : report.b_only) out << "b_only\t" << t << '\n';
}

}  // namespace scl
