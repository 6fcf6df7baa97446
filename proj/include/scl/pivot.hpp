// Pivot feature selection and cross-domain overlap diagnostics.
//
// Pivots are the features whose presence the auxiliary task predicts. The
// selection strategies:
//
//   mi_source  rank candidates by mutual information against source labels
//   mi_oracle  same computation against target labels (ceiling diagnostic;
//              training still sees only source labels)
//   frequency  rank by document frequency over the given rows
//   random     uniform sample of candidates, no scores
//
// MI is the plugin estimate in nats. The log base only rescales scores and
// never changes the ranking, which is covered by a property test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "scl/error.hpp"
#include "scl/featurize.hpp"
#include "scl/rng.hpp"

namespace scl {

enum class PivotStrategy { mi_source, mi_oracle, frequency, random };

inline const char* to_string(PivotStrategy s) {
  switch (s) {
    case PivotStrategy::mi_source: return "mi_source";
    case PivotStrategy::mi_oracle: return "mi_oracle";
    case PivotStrategy::frequency: return "frequency";
    case PivotStrategy::random: return "random";
  }
  return "?";
}

inline PivotStrategy pivot_strategy_from(const std::string& name) {
  if (name == "mi_source" || name == "mi") return PivotStrategy::mi_source;
  if (name == "mi_oracle" || name == "oracle") return PivotStrategy::mi_oracle;
  if (name == "frequency") return PivotStrategy::frequency;
  if (name == "random") return PivotStrategy::random;
  fail_arg("unknown pivot strategy '", name, "'");
}

struct PivotSet {
  // Scored strategies: descending score, ties by ascending feature index.
  // Random strategy: ascending feature index.
  std::vector<std::uint32_t> indices;
  std::vector<double> scores;  // parallel to indices; empty for random
  PivotStrategy strategy = PivotStrategy::mi_source;
  std::size_t candidate_min_df = 0;
  std::uint64_t seed = 0;
  std::size_t requested = 0;    // the p that was asked for
  bool truncated = false;       // p exceeded the candidate count

  std::size_t size() const { return indices.size(); }
};

// Plugin mutual information of a 2x2 contingency table, natural log.
// Cells: n_fy = count of rows with feature value f and label y.
inline double mi_from_counts(std::uint64_t n11, std::uint64_t n10, std::uint64_t n01,
                             std::uint64_t n00) {
  const std::uint64_t total = n11 + n10 + n01 + n00;
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  const double pf1 = static_cast<double>(n11 + n10) / n;
  const double pf0 = static_cast<double>(n01 + n00) / n;
  const double py1 = static_cast<double>(n11 + n01) / n;
  const double py0 = static_cast<double>(n10 + n00) / n;
  double mi = 0.0;
  const auto add_term = [&](std::uint64_t cell, double pf, double py) {
    if (cell == 0) return;  // 0*ln(0/q) contributes 0
    const double pfy = static_cast<double>(cell) / n;
    mi += pfy * std::log(pfy / (pf * py));
  };
  add_term(n11, pf1, py1);
  add_term(n10, pf1, py0);
  add_term(n01, pf0, py1);
  add_term(n00, pf0, py0);
  return mi < 0.0 ? 0.0 : mi;  // guard against -1e-17 from rounding
}

inline double mutual_information(const std::vector<std::uint8_t>& feature_column,
                                 const std::vector<std::uint8_t>& labels) {
  if (feature_column.size() != labels.size())
    fail_arg("mutual_information: length mismatch (", feature_column.size(), " vs ",
             labels.size(), ")");
  if (feature_column.empty()) fail_arg("mutual_information: empty input");
  std::uint64_t cells[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < labels.size(); ++i)
    ++cells[feature_column[i] ? 1 : 0][labels[i] ? 1 : 0];
  return mi_from_counts(cells[1][1], cells[1][0], cells[0][1], cells[0][0]);
}

// Feature indices with document frequency >= min_df_each in BOTH domains,
// ascending. Counts cover every corpus the vocabulary was built from
// (labeled and unlabeled alike).
inline std::vector<std::uint32_t> candidate_features(const Vocabulary& vocab,
                                                     const std::string& domain_a,
                                                     const std::string& domain_b,
                                                     std::size_t min_df_each = 10) {
  const auto it_a = vocab.df_by_domain.find(domain_a);
  const auto it_b = vocab.df_by_domain.find(domain_b);
  if (it_a == vocab.df_by_domain.end()) fail_arg("candidate_features: unknown domain '", domain_a, "'");
  if (it_b == vocab.df_by_domain.end()) fail_arg("candidate_features: unknown domain '", domain_b, "'");
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < vocab.size(); ++i)
    if (it_a->second[i] >= min_df_each && it_b->second[i] >= min_df_each) out.push_back(i);
  return out;
}

namespace detail {

// Per-candidate presence/label counts in one pass over the matrix.
struct CandidateCounts {
  std::vector<std::uint64_t> present_pos, present_neg;
  std::uint64_t total_pos = 0, total_neg = 0, total_rows = 0;
};

inline CandidateCounts count_candidates(const DesignMatrix& matrix,
                                        const std::vector<std::uint32_t>& candidates,
                                        bool need_labels) {
  CandidateCounts counts;
  counts.present_pos.assign(candidates.size(), 0);
  counts.present_neg.assign(candidates.size(), 0);
  counts.total_rows = matrix.size();

  std::vector<std::int32_t> slot(matrix.dim, -1);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (candidates[c] >= matrix.dim)
      fail_arg("select_pivots: candidate index ", candidates[c], " out of range for dim ",
               matrix.dim);
    slot[candidates[c]] = static_cast<std::int32_t>(c);
  }

  for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
    const bool positive = need_labels ? (*matrix.labels)[r] != 0 : true;
    if (need_labels) (positive ? counts.total_pos : counts.total_neg)++;
    for (std::uint32_t j : matrix.rows[r].indices) {
      const std::int32_t s = slot[j];
      if (s >= 0) (positive ? counts.present_pos : counts.present_neg)[s]++;
    }
  }
  return counts;
}

}  // namespace detail

// Top-p pivot selection. For mi_* the matrix must carry labels (the caller
// passes the labeled source matrix for mi_source and the labeled target
// matrix for mi_oracle). If p exceeds the candidate count the result is
// truncated and flagged.
inline PivotSet select_pivots(const DesignMatrix& matrix,
                              const std::vector<std::uint32_t>& candidates, std::size_t p,
                              PivotStrategy strategy, std::uint64_t seed = 0,
                              std::size_t candidate_min_df = 0) {
  if (p < 1) fail_arg("select_pivots: p must be >= 1");

  PivotSet set;
  set.strategy = strategy;
  set.seed = seed;
  set.requested = p;
  set.candidate_min_df = candidate_min_df;
  set.truncated = p > candidates.size();
  const std::size_t keep = std::min(p, candidates.size());

  if (strategy == PivotStrategy::random) {
    rng::Engine eng = rng::make_engine(seed);
    for (std::size_t pos : rng::sample_without_replacement(candidates.size(), keep, eng))
      set.indices.push_back(candidates[pos]);
    std::sort(set.indices.begin(), set.indices.end());
    return set;
  }

  const bool is_mi = strategy != PivotStrategy::frequency;
  if (is_mi && !matrix.labels.has_value())
    fail_arg("select_pivots: ", to_string(strategy), " requires a labeled matrix");

  const detail::CandidateCounts counts = detail::count_candidates(matrix, candidates, is_mi);
  std::vector<std::pair<double, std::uint32_t>> scored(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double score;
    if (is_mi) {
      const std::uint64_t n11 = counts.present_pos[c];
      const std::uint64_t n10 = counts.present_neg[c];
      score = mi_from_counts(n11, n10, counts.total_pos - n11, counts.total_neg - n10);
    } else {
      score = static_cast<double>(counts.present_pos[c] + counts.present_neg[c]);
    }
    scored[c] = {score, candidates[c]};
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;  // deterministic tie-break
  });
  for (std::size_t c = 0; c < keep; ++c) {
    set.scores.push_back(scored[c].first);
    set.indices.push_back(scored[c].second);
  }
  return set;
}

struct OverlapReport {
  std::vector<std::string> shared;  // all lists sorted lexicographically
  std::vector<std::string> a_only;
  std::vector<std::string> b_only;
};

// Overlap is computed on TERM STRINGS, not indices: the two pivot sets
// usually come from different vocabularies.
inline OverlapReport pivot_overlap(const PivotSet& a, const PivotSet& b,
                                   const Vocabulary& vocab_a, const Vocabulary& vocab_b) {
  std::vector<std::string> terms_a, terms_b;
  for (std::uint32_t i : a.indices) terms_a.push_back(vocab_a.terms.at(i));
  for (std::uint32_t i : b.indices) terms_b.push_back(vocab_b.terms.at(i));
  std::sort(terms_a.begin(), terms_a.end());
  std::sort(terms_b.begin(), terms_b.end());

  OverlapReport report;
  std::set_intersection(terms_a.begin(), terms_a.end(), terms_b.begin(), terms_b.end(),
                        std::back_inserter(report.shared));
  std::set_difference(terms_a.begin(), terms_a.end(), terms_b.begin(), terms_b.end(),
                      std::back_inserter(report.a_only));
  std::set_difference(terms_b.begin(), terms_b.end(), terms_a.begin(), terms_a.end(),
                      std::back_inserter(report.b_only));
  return report;
}

}  // namespace scl
