// Synthetic two-domain sentiment corpus.
//
// Desk-scale stand-in for the licensed review datasets, built so that the
// adaptation story is structurally present:
//
//   * `general` terms appear in both domains and correlate with the label
//     everywhere - these are the good pivot candidates;
//   * each domain owns `specific` terms that correlate strongly with the
//     label at home and appear only rarely (with the same weak polarity) in
//     the other domain - a source-only classifier barely uses the target's,
//     while pivot-based adaptation can align them;
//   * shared `noise` terms appear everywhere, label-independent, and are
//     frequent enough to be pivot candidates - these are what random pivot
//     selection mostly lands on.
//
// Documents are generated independently per term with label-conditional
// inclusion probabilities; token order is shuffled so bigrams carry no
// systematic signal.
#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "scl/corpus.hpp"
#include "scl/error.hpp"
#include "scl/rng.hpp"

namespace scl {

struct SyntheticSpec {
  std::size_t general_terms = 40;
  std::size_t specific_terms = 60;  // per domain
  std::size_t noise_terms = 500;    // shared
  std::size_t labeled_per_domain = 1000;
  std::size_t unlabeled_per_domain = 2000;

  // P(term present | doc label agrees / disagrees with the term's polarity)
  double general_match = 0.13;
  double general_mismatch = 0.07;
  double specific_home_match = 0.30;
  double specific_home_mismatch = 0.04;
  // away-domain appearances are label-neutral: frequent enough to stay pivot
  // candidates, useless to a source-only classifier
  double specific_away_match = 0.006;
  double specific_away_mismatch = 0.006;
  double noise_rate = 0.05;  // label-independent

  std::string domain_a = "alpha";
  std::string domain_b = "beta";
  std::uint64_t seed = 0;
};

namespace detail {

struct TermSpec {
  std::string text;
  int polarity;  // +1 / -1, 0 for noise
  double p_match, p_mismatch;
};

inline std::string padded(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, i);
  return buf;
}

inline std::vector<TermSpec> domain_terms(const SyntheticSpec& spec, bool is_a) {
  std::vector<TermSpec> terms;
  for (std::size_t i = 0; i < spec.general_terms; ++i)
    terms.push_back({padded("gen", i), i % 2 == 0 ? 1 : -1, spec.general_match,
                     spec.general_mismatch});
  const auto add_specific = [&](const char* prefix, bool home) {
    for (std::size_t i = 0; i < spec.specific_terms; ++i)
      terms.push_back({padded(prefix, i), i % 2 == 0 ? 1 : -1,
                       home ? spec.specific_home_match : spec.specific_away_match,
                       home ? spec.specific_home_mismatch : spec.specific_away_mismatch});
  };
  add_specific("aspec", is_a);
  add_specific("bspec", !is_a);
  for (std::size_t i = 0; i < spec.noise_terms; ++i)
    terms.push_back({padded("noise", i), 0, spec.noise_rate, spec.noise_rate});
  return terms;
}

inline Document synth_document(const std::vector<TermSpec>& terms, std::size_t id,
                               const std::string& domain, bool keep_label, rng::Engine& eng) {
  Document doc;
  doc.id = id;
  doc.domain = domain;
  for (int attempt = 0; attempt < 64 && doc.tokens.empty(); ++attempt) {
    const int label = rng::next_below(eng, 2) ? 1 : 0;
    const int label_sign = label == 1 ? 1 : -1;
    for (const TermSpec& term : terms) {
      const double p = (term.polarity == 0 || term.polarity == label_sign) ? term.p_match
                                                                           : term.p_mismatch;
      if (rng::next_bernoulli(eng, p)) doc.tokens.push_back(term.text);
    }
    if (!doc.tokens.empty() && keep_label) doc.label = label;
  }
  if (doc.tokens.empty()) fail_arg("synthetic generator produced an empty document");
  rng::shuffle(doc.tokens, eng);
  return doc;
}

inline Corpus synth_corpus(const SyntheticSpec& spec, bool is_a, bool labeled, std::size_t count,
                           std::uint64_t stream) {
  rng::Engine eng = rng::make_engine(spec.seed, stream);
  const std::vector<TermSpec> terms = domain_terms(spec, is_a);
  Corpus corpus;
  corpus.domain = is_a ? spec.domain_a : spec.domain_b;
  corpus.labeled = labeled;
  for (std::size_t i = 0; i < count; ++i)
    corpus.documents.push_back(synth_document(terms, i, corpus.domain, labeled, eng));
  return corpus;
}

}  // namespace detail

inline std::pair<DomainData, DomainData> make_synthetic_pair(const SyntheticSpec& spec) {
  DomainData a, b;
  a.name = spec.domain_a;
  b.name = spec.domain_b;
  a.labeled = detail::synth_corpus(spec, true, true, spec.labeled_per_domain, 101);
  a.unlabeled = detail::synth_corpus(spec, true, false, spec.unlabeled_per_domain, 102);
  b.labeled = detail::synth_corpus(spec, false, true, spec.labeled_per_domain, 103);
  b.unlabeled = detail::synth_corpus(spec, false, false, spec.unlabeled_per_domain, 104);
  return {std::move(a), std::move(b)};
}

}  // namespace scl
