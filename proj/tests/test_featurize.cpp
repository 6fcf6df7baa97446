#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>

#include "scl/featurize.hpp"
#include "scl/io.hpp"
#include "scl/rng.hpp"

namespace {

scl::Corpus make_corpus(const std::vector<std::vector<std::string>>& docs,
                        const std::string& domain = "d", bool labeled = false) {
  scl::Corpus corpus;
  corpus.domain = domain;
  corpus.labeled = labeled;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    scl::Document doc;
    doc.id = i;
    doc.tokens = docs[i];
    doc.domain = domain;
    if (labeled) doc.label = static_cast<int>(i % 2);
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace

TEST_CASE("build_vocabulary applies the min_df cutoff over all corpora") {
  const scl::Corpus corpus = make_corpus({{"a", "b"}, {"a", "c"}});
  const scl::Vocabulary vocab = scl::build_vocabulary({corpus}, 2);
  REQUIRE(vocab.size() == 1);
  CHECK(vocab.terms[0] == "a");
  CHECK(vocab.df_total[0] == 2);

  const scl::Corpus twice = make_corpus({{"a", "b"}, {"a", "b"}});
  const scl::Vocabulary vocab2 = scl::build_vocabulary({twice}, 2);
  CHECK(vocab2.terms == std::vector<std::string>{"a", "a_b", "b"});
}

TEST_CASE("vocabulary records per-domain document frequencies") {
  const scl::Corpus books = make_corpus({{"a", "b"}, {"a"}}, "books");
  const scl::Corpus dvd = make_corpus({{"a"}}, "dvd");
  const scl::Vocabulary vocab = scl::build_vocabulary({books, dvd}, 1);
  const std::uint32_t a = vocab.index.at("a");
  CHECK(vocab.df_by_domain.at("books")[a] == 2);
  CHECK(vocab.df_by_domain.at("dvd")[a] == 1);
  CHECK(vocab.df_total[a] == 3);
  const std::uint32_t b = vocab.index.at("b");
  CHECK(vocab.df_by_domain.at("dvd")[b] == 0);
}

TEST_CASE("vocabulary construction is order independent") {
  std::vector<std::vector<std::string>> docs = {
      {"x", "y", "z"}, {"x", "y"}, {"z", "w", "x"}, {"y", "z"}, {"w", "w", "q"}};
  const scl::Vocabulary reference = scl::build_vocabulary({make_corpus(docs)}, 2);

  scl::rng::Engine eng = scl::rng::make_engine(11);
  for (int trial = 0; trial < 10; ++trial) {
    scl::rng::shuffle(docs, eng);
    const scl::Vocabulary shuffled = scl::build_vocabulary({make_corpus(docs)}, 2);
    CHECK(shuffled.terms == reference.terms);
    CHECK(shuffled.df_total == reference.df_total);
  }
}

TEST_CASE("build_vocabulary rejects bad arguments") {
  CHECK_THROWS_AS(scl::build_vocabulary(std::vector<scl::Corpus>{}, 1), scl::InvalidArgument);
  CHECK_THROWS_AS(scl::build_vocabulary({make_corpus({{"a"}})}, 0), scl::InvalidArgument);
}

TEST_CASE("vectorize uses binary presence with bigrams") {
  scl::Vocabulary vocab = scl::build_vocabulary({make_corpus({{"good", "book"}, {"good", "book"}})}, 1);
  // vocabulary: book, good, good_book
  REQUIRE(vocab.terms == std::vector<std::string>{"book", "good", "good_book"});

  scl::Document doc;
  doc.tokens = {"good", "good", "book"};
  const scl::SparseVector vec = scl::vectorize(doc, vocab);
  CHECK(vec.dim == 3);
  CHECK(vec.indices == std::vector<std::uint32_t>{0, 1, 2});

  scl::Document oov;
  oov.tokens = {"zzz"};
  const scl::SparseVector empty = scl::vectorize(oov, vocab);
  CHECK(empty.indices.empty());
  CHECK(empty.dim == 3);

  CHECK(scl::vectorize(doc, vocab) == scl::vectorize(doc, vocab));
}

TEST_CASE("sparse vectors have strictly increasing indices below dim") {
  const scl::Corpus corpus = make_corpus(
      {{"a", "b", "c", "a", "b"}, {"c", "c", "d"}, {"d", "a", "e", "b"}, {"e", "b"}});
  const scl::Vocabulary vocab = scl::build_vocabulary({corpus}, 1);
  for (const scl::Document& doc : corpus.documents) {
    const scl::SparseVector vec = scl::vectorize(doc, vocab);
    CHECK(vec.dim == vocab.size());
    for (std::size_t i = 0; i + 1 < vec.indices.size(); ++i)
      CHECK(vec.indices[i] < vec.indices[i + 1]);
    if (!vec.indices.empty()) CHECK(vec.indices.back() < vec.dim);
  }
}

TEST_CASE("vectorize_corpus carries labels and order") {
  const scl::Corpus corpus = make_corpus({{"a"}, {"b"}, {"a", "b"}}, "d", true);
  const scl::Vocabulary vocab = scl::build_vocabulary({corpus}, 1);
  const scl::DesignMatrix matrix = scl::vectorize_corpus(corpus, vocab);
  REQUIRE(matrix.size() == 3);
  REQUIRE(matrix.labels.has_value());
  CHECK(matrix.labels->size() == 3);
  CHECK(matrix.dim == vocab.size());
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(matrix.rows[i] == scl::vectorize(corpus.documents[i], vocab));

  scl::Corpus empty;
  empty.domain = "d";
  const scl::DesignMatrix none = scl::vectorize_corpus(empty, vocab);
  CHECK(none.size() == 0);
  CHECK_FALSE(none.labels.has_value());
}

TEST_CASE("vocabulary round-trips through its file format") {
  const scl::Corpus corpus =
      make_corpus({{"alpha", "beta"}, {"alpha", "gamma"}, {"beta", "alpha"}});
  const scl::Vocabulary vocab = scl::build_vocabulary({corpus}, 1);
  const std::string path =
      (std::filesystem::temp_directory_path() / "vocab_roundtrip.tsv").string();
  scl::save_vocabulary(vocab, path);
  const scl::Vocabulary loaded = scl::load_vocabulary(path);
  CHECK(loaded.terms == vocab.terms);
  CHECK(loaded.df_total == vocab.df_total);
  CHECK(loaded.index.at("alpha") == vocab.index.at("alpha"));

  // per-domain counts are rebuilt on demand
  scl::Vocabulary recounted = loaded;
  scl::count_domain_dfs(recounted, corpus);
  CHECK(recounted.df_by_domain.at("d") == vocab.df_by_domain.at("d"));
}
