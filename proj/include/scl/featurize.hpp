// Unigram+bigram vocabulary construction and binary bag-of-n-grams
// vectorization.
//
// Features are presence indicators, not counts: pivot-prediction targets must
// lie in [0,1], and binarizing the inputs keeps input and target semantics
// identical. Terms are sorted lexicographically so the vocabulary (and hence
// every feature index) is independent of document order.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scl/corpus.hpp"
#include "scl/error.hpp"

namespace scl {

struct Vocabulary {
  std::vector<std::string> terms;  // lexicographic; position = feature index
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::uint64_t> df_total;  // per term, across all build corpora
  // domain -> per-term document frequency. Empty for vocabularies loaded from
  // disk; rebuild with count_domain_dfs before candidate selection.
  std::map<std::string, std::vector<std::uint64_t>> df_by_domain;

  std::size_t size() const { return terms.size(); }
};

// Binary sparse row: feature i is present iff i appears in `indices`.
// Indices are strictly increasing and every stored value is defined as 1.0.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::size_t dim = 0;

  std::size_t nnz() const { return indices.size(); }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct DesignMatrix {
  std::vector<SparseVector> rows;
  std::optional<std::vector<int>> labels;  // parallel to rows when present
  std::size_t dim = 0;

  std::size_t size() const { return rows.size(); }
};

namespace detail {

// Distinct unigram+bigram terms of one document. Bigrams join adjacent
// tokens with '_', matching the processed-file convention so both ingestion
// paths produce identical term strings.
inline std::vector<std::string> document_terms(const Document& doc) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> terms;
  terms.reserve(2 * doc.tokens.size());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (seen.insert(doc.tokens[i]).second) terms.push_back(doc.tokens[i]);
    if (i + 1 < doc.tokens.size()) {
      std::string bigram = doc.tokens[i] + "_" + doc.tokens[i + 1];
      if (seen.insert(bigram).second) terms.push_back(std::move(bigram));
    }
  }
  return terms;
}

}  // namespace detail

// A term enters the vocabulary iff its document frequency summed over all
// given corpora is >= min_df. Per-domain document frequencies are kept for
// pivot candidate selection.
inline Vocabulary build_vocabulary(const std::vector<const Corpus*>& corpora,
                                   std::size_t min_df = 5) {
  if (corpora.empty()) fail_arg("build_vocabulary: no corpora given");
  if (min_df < 1) fail_arg("build_vocabulary: min_df must be >= 1");

  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> df;
  std::vector<std::string> domains;
  for (const Corpus* corpus : corpora) {
    if (std::find(domains.begin(), domains.end(), corpus->domain) == domains.end())
      domains.push_back(corpus->domain);
    for (const Document& doc : corpus->documents)
      for (std::string& term : detail::document_terms(doc)) ++df[std::move(term)][corpus->domain];
  }

  Vocabulary vocab;
  for (const auto& [term, per_domain] : df) {
    std::uint64_t total = 0;
    for (const auto& [_, count] : per_domain) total += count;
    if (total >= min_df) vocab.terms.push_back(term);
  }
  std::sort(vocab.terms.begin(), vocab.terms.end());

  vocab.index.reserve(vocab.terms.size());
  vocab.df_total.resize(vocab.terms.size());
  for (const std::string& domain : domains)
    vocab.df_by_domain[domain].assign(vocab.terms.size(), 0);
  for (std::uint32_t i = 0; i < vocab.terms.size(); ++i) {
    vocab.index.emplace(vocab.terms[i], i);
    const auto& per_domain = df.at(vocab.terms[i]);
    std::uint64_t total = 0;
    for (const auto& [domain, count] : per_domain) {
      vocab.df_by_domain[domain][i] = count;
      total += count;
    }
    vocab.df_total[i] = total;
  }
  return vocab;
}

inline Vocabulary build_vocabulary(const std::vector<Corpus>& corpora, std::size_t min_df = 5) {
  std::vector<const Corpus*> ptrs;
  ptrs.reserve(corpora.size());
  for (const Corpus& c : corpora) ptrs.push_back(&c);
  return build_vocabulary(ptrs, min_df);
}

// Recompute df_by_domain entries for the given corpus against an existing
// vocabulary (used after loading a vocabulary from disk, which does not carry
// per-domain counts).
inline void count_domain_dfs(Vocabulary& vocab, const Corpus& corpus) {
  auto& counts = vocab.df_by_domain[corpus.domain];
  if (counts.size() != vocab.size()) counts.assign(vocab.size(), 0);
  for (const Document& doc : corpus.documents)
    for (const std::string& term : detail::document_terms(doc))
      if (auto it = vocab.index.find(term); it != vocab.index.end()) ++counts[it->second];
}

// Binary presence vector; out-of-vocabulary terms are dropped, so an all-OOV
// document yields an empty vector.
inline SparseVector vectorize(const Document& doc, const Vocabulary& vocab) {
  SparseVector vec;
  vec.dim = vocab.size();
  for (const std::string& term : detail::document_terms(doc))
    if (auto it = vocab.index.find(term); it != vocab.index.end())
      vec.indices.push_back(it->second);
  std::sort(vec.indices.begin(), vec.indices.end());
  return vec;
}

inline DesignMatrix vectorize_corpus(const Corpus& corpus, const Vocabulary& vocab) {
  DesignMatrix matrix;
  matrix.dim = vocab.size();
  matrix.rows.reserve(corpus.size());
  for (const Document& doc : corpus.documents) matrix.rows.push_back(vectorize(doc, vocab));
  if (corpus.labeled) {
    std::vector<int> labels;
    labels.reserve(corpus.size());
    for (const Document& doc : corpus.documents) labels.push_back(*doc.label);
    matrix.labels = std::move(labels);
  }
  return matrix;
}

}  // namespace scl
