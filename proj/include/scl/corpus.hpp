// Review-corpus ingestion and train/validation splitting.
//
// Two on-disk formats are supported:
//
//   processed  one document per line, whitespace-separated `feature:count`
//              tokens with an optional final `#label#:<tag>` token. Bigram
//              features use `_` as the internal joiner. `feature:count`
//              expands into `count` repeated tokens so both formats feed the
//              same vectorization path downstream.
//
//   tsv        labeled:   `label<TAB>raw text`, label in {0,1,positive,negative}
//              unlabeled: `raw text`
//              Raw text is lowercased (ASCII) and split on whitespace with
//              non-alphanumeric characters stripped from token edges; bytes
//              >= 0x80 are treated as word characters so UTF-8 words survive.
//
// Corpora are immutable after construction and keep exact file order, so
// re-reading a file always yields an identical value.
#pragma once

#include <cctype>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scl/error.hpp"
#include "scl/rng.hpp"

namespace scl {

struct Document {
  std::size_t id = 0;  // 0-based position within its source file
  std::vector<std::string> tokens;
  std::optional<int> label;  // 1 = positive, 0 = negative, absent = unlabeled
  std::string domain;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
  std::vector<Document> documents;
  std::string domain;
  bool labeled = false;

  std::size_t size() const { return documents.size(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// One domain's data as used by the experiment runner: a fully labeled corpus
// (train/validation source material, or the evaluation set when the domain is
// the target) plus an unlabeled corpus.
struct DomainData {
  std::string name;
  Corpus labeled;
  Corpus unlabeled;
};

struct SplitSpec {
  std::size_t train_size = 1600;
  std::size_t validation_size = 400;
  std::uint64_t seed = 0;
};

namespace detail {

inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

inline void append_text_tokens(std::string_view text, std::vector<std::string>& out) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::size_t lo = i, hi = j;
      while (lo < hi && !is_word_byte(static_cast<unsigned char>(text[lo]))) ++lo;
      while (hi > lo && !is_word_byte(static_cast<unsigned char>(text[hi - 1]))) --hi;
      if (hi > lo) {
        std::string token(text.substr(lo, hi - lo));
        for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(token));
      }
    }
    i = j;
  }
}

inline bool is_blank(const std::string& line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_parse("cannot open file: ", path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

// Blitzer-style processed format. Unknown label tags, malformed feature:count
// tokens and empty documents are reported with their 1-based line number.
inline Corpus parse_processed(const std::string& path, const std::string& domain) {
  const std::vector<std::string> lines = detail::read_lines(path);

  Corpus corpus;
  corpus.domain = domain;
  bool saw_label = false;
  bool saw_unlabeled = false;

  for (std::size_t lineno = 1; lineno <= lines.size(); ++lineno) {
    const std::string& line = lines[lineno - 1];
    if (detail::is_blank(line)) continue;

    Document doc;
    doc.id = corpus.documents.size();
    doc.domain = domain;

    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
      while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < n && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j == i) break;
      const std::string_view tok(line.data() + i, j - i);
      i = j;

      if (tok.starts_with("#label#:")) {
        const std::string_view tag = tok.substr(8);
        // The label marker is only valid as the final token of the line.
        std::size_t rest = i;
        while (rest < n && std::isspace(static_cast<unsigned char>(line[rest]))) ++rest;
        if (rest != n)
          fail_parse(path, ":", lineno, ": label marker is not the final token");
        if (tag == "positive") {
          doc.label = 1;
        } else if (tag == "negative") {
          doc.label = 0;
        } else if (tag == "unlabeled") {
          // explicit unlabeled marker
        } else {
          fail_parse(path, ":", lineno, ": unknown label tag '", std::string(tag), "'");
        }
        break;
      }

      const std::size_t colon = tok.rfind(':');
      if (colon == std::string_view::npos || colon == 0)
        fail_parse(path, ":", lineno, ": feature token without ':' separator: '",
                   std::string(tok), "'");
      const std::string_view feature = tok.substr(0, colon);
      const std::string_view count_text = tok.substr(colon + 1);
      long count = 0;
      bool numeric = !count_text.empty() && count_text.size() <= 9;
      for (char c : count_text)
        if (!std::isdigit(static_cast<unsigned char>(c))) numeric = false;
      if (numeric) count = std::stol(std::string(count_text));
      if (!numeric || count < 1)
        fail_parse(path, ":", lineno, ": bad count '", std::string(count_text),
                   "' for feature '", std::string(feature), "'");
      for (long k = 0; k < count; ++k) doc.tokens.emplace_back(feature);
    }

    if (doc.tokens.empty())
      fail_parse(path, ":", lineno, ": document has no feature tokens");
    if (doc.label.has_value())
      saw_label = true;
    else
      saw_unlabeled = true;
    corpus.documents.push_back(std::move(doc));
  }

  if (corpus.documents.empty()) fail_parse(path, ": file contains no documents");
  if (saw_label && saw_unlabeled)
    fail_parse(path, ": mixes labeled and unlabeled documents");
  corpus.labeled = saw_label;
  return corpus;
}

// `label<TAB>raw text` (labeled) or `raw text` (unlabeled).
inline Corpus parse_tsv(const std::string& path, const std::string& domain, bool labeled) {
  const std::vector<std::string> lines = detail::read_lines(path);

  Corpus corpus;
  corpus.domain = domain;
  corpus.labeled = labeled;

  for (std::size_t lineno = 1; lineno <= lines.size(); ++lineno) {
    const std::string& line = lines[lineno - 1];
    if (detail::is_blank(line)) continue;

    Document doc;
    doc.id = corpus.documents.size();
    doc.domain = domain;

    std::string_view text(line);
    if (labeled) {
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos)
        fail_parse(path, ":", lineno, ": labeled line has no <TAB> separator");
      const std::string_view tag(line.data(), tab);
      if (tag == "1" || tag == "positive") {
        doc.label = 1;
      } else if (tag == "0" || tag == "negative") {
        doc.label = 0;
      } else {
        fail_parse(path, ":", lineno, ": bad label token '", std::string(tag), "'");
      }
      text = std::string_view(line).substr(tab + 1);
    }

    detail::append_text_tokens(text, doc.tokens);
    if (doc.tokens.empty())
      fail_parse(path, ":", lineno, ": document has no tokens after tokenization");
    corpus.documents.push_back(std::move(doc));
  }

  if (corpus.documents.empty()) fail_parse(path, ": file contains no documents");
  return corpus;
}

// Deterministic unstratified split: permute the corpus with a generator seeded
// from spec.seed, then take the first train_size documents as train and the
// next validation_size as validation, both in permuted order.
inline std::pair<Corpus, Corpus> split(const Corpus& corpus, const SplitSpec& spec) {
  if (!corpus.labeled) fail_arg("split: corpus must be labeled");
  if (spec.train_size + spec.validation_size > corpus.size())
    fail_arg("split: corpus has ", corpus.size(), " documents, need ",
             spec.train_size + spec.validation_size);

  rng::Engine eng = rng::make_engine(spec.seed);
  const std::vector<std::size_t> order = rng::permutation(corpus.size(), eng);

  Corpus train, validation;
  train.domain = validation.domain = corpus.domain;
  train.labeled = validation.labeled = true;
  train.documents.reserve(spec.train_size);
  validation.documents.reserve(spec.validation_size);
  for (std::size_t i = 0; i < spec.train_size; ++i)
    train.documents.push_back(corpus.documents[order[i]]);
  for (std::size_t i = 0; i < spec.validation_size; ++i)
    validation.documents.push_back(corpus.documents[order[spec.train_size + i]]);
  return {std::move(train), std::move(validation)};
}

}  // namespace scl
