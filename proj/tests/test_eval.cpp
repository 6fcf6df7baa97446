#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "scl/eval.hpp"
#include "scl/synthetic.hpp"

namespace {

// Four tiny domains; enough structure for logreg to run, small enough that a
// 12-pair sweep is instant.
std::vector<scl::DomainData> tiny_domains() {
  std::vector<scl::DomainData> domains;
  const char* names[] = {"w", "x", "y", "z"};
  for (int d = 0; d < 4; ++d) {
    scl::SyntheticSpec spec;
    spec.general_terms = 6;
    spec.specific_terms = 4;
    spec.noise_terms = 12;
    spec.labeled_per_domain = 40;
    spec.unlabeled_per_domain = 30;
    spec.seed = 900 + d;
    spec.domain_a = names[d];
    spec.domain_b = "unused";
    auto [a, b] = scl::make_synthetic_pair(spec);
    domains.push_back(std::move(a));
  }
  return domains;
}

scl::BenchmarkConfig tiny_config() {
  scl::BenchmarkConfig bc;
  bc.systems = {scl::SystemKind::logreg};
  bc.seeds = 1;
  bc.split = {30, 10, 0};
  bc.vocab_min_df = 2;
  bc.pivot_min_df = 2;
  bc.train.d = 4;
  bc.train.p = 4;
  bc.train.epochs = 2;
  bc.train.batch_size = 10;
  return bc;
}

}  // namespace

TEST_CASE("benchmark enumerates all ordered pairs") {
  const auto domains = tiny_domains();
  const scl::BenchmarkConfig bc = tiny_config();
  const scl::BenchmarkReport report = scl::run_benchmark(domains, bc);
  CHECK(report.pairs.size() == 12);  // 4 * 3 ordered pairs
  CHECK(report.results.size() == 12);
  for (const scl::RunResult& r : report.results) {
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 1.0);
    CHECK_FALSE(r.manifest.empty());
    CHECK(r.config_hash.size() == 16);
  }
}

TEST_CASE("benchmark output is deterministic and job-count independent") {
  auto domains = tiny_domains();
  domains.resize(2);
  scl::BenchmarkConfig bc = tiny_config();
  bc.systems = {scl::SystemKind::logreg, scl::SystemKind::joint_mi};
  bc.seeds = 2;

  const scl::BenchmarkReport a = scl::run_benchmark(domains, bc);
  const scl::BenchmarkReport b = scl::run_benchmark(domains, bc);
  bc.jobs = 4;
  const scl::BenchmarkReport parallel = scl::run_benchmark(domains, bc);

  std::ostringstream csv_a, csv_b, csv_p;
  scl::emit_csv(a, csv_a);
  scl::emit_csv(b, csv_b);
  scl::emit_csv(parallel, csv_p);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(csv_a.str() == csv_p.str());
}

TEST_CASE("benchmark validates inputs before training") {
  auto domains = tiny_domains();
  scl::BenchmarkConfig bc = tiny_config();

  bc.pair_filter = {{"w", "nope"}};
  CHECK_THROWS_AS(scl::run_benchmark(domains, bc), scl::InvalidArgument);

  bc.pair_filter.clear();
  domains[1].labeled.documents.clear();
  CHECK_THROWS_AS(scl::run_benchmark(domains, bc), scl::InvalidArgument);
}

TEST_CASE("oracle pivots come from target labels, training from source only") {
  auto domains = tiny_domains();
  domains.resize(2);
  scl::BenchmarkConfig bc = tiny_config();
  bc.systems = {scl::SystemKind::joint_oracle};
  bc.pair_filter = {{"w", "x"}};
  bc.train.epochs = 1;
  const scl::BenchmarkReport report = scl::run_benchmark(domains, bc);
  REQUIRE(report.results.size() == 1);
  CHECK(report.results[0].manifest.find("pivot_strategy=mi_oracle") != std::string::npos);
}

TEST_CASE("csv emission round-trips") {
  auto domains = tiny_domains();
  domains.resize(2);
  scl::BenchmarkConfig bc = tiny_config();
  bc.seeds = 2;
  const scl::BenchmarkReport report = scl::run_benchmark(domains, bc);

  std::ostringstream csv;
  scl::emit_csv(report, csv);
  std::istringstream in(csv.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == scl::kResultsCsvHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto parts = scl::detail::split_on(line, ',');
    REQUIRE(parts.size() == 7);
    const scl::RunResult& r = report.results[rows];
    CHECK(std::string(parts[0]) == r.source);
    CHECK(std::string(parts[1]) == r.target);
    CHECK(std::string(parts[2]) == to_string(r.system));
    CHECK(scl::parse_u64(parts[3]) == r.seed);
    CHECK(scl::parse_double(parts[4]) == r.accuracy);  // exact round-trip
    CHECK(scl::parse_u64(parts[5]) == r.best_epoch);
    ++rows;
  }
  CHECK(rows == report.results.size());
}

TEST_CASE("markdown table shape") {
  auto domains = tiny_domains();
  domains.resize(2);
  scl::BenchmarkConfig bc = tiny_config();
  const scl::BenchmarkReport report = scl::run_benchmark(domains, bc);

  std::ostringstream md;
  scl::emit_markdown(report, md);
  std::istringstream in(md.str());
  std::string line;
  std::size_t pipe_rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] == '|') ++pipe_rows;
  // header + separator + one row per pair + averages
  CHECK(pipe_rows == report.pairs.size() + 3);
}

TEST_CASE("empty result set emits header-only files") {
  scl::BenchmarkReport empty;
  empty.systems = {scl::SystemKind::logreg};

  std::ostringstream csv;
  scl::emit_csv(empty, csv);
  CHECK(csv.str() == std::string(scl::kResultsCsvHeader) + "\n");

  std::ostringstream md;
  scl::emit_markdown(empty, md);
  std::istringstream in(md.str());
  std::string line;
  std::size_t pipe_rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] == '|') ++pipe_rows;
  CHECK(pipe_rows == 2);  // header + separator, no averages
}

TEST_CASE("welch rows appear for multi-seed runs") {
  auto domains = tiny_domains();
  domains.resize(2);
  scl::BenchmarkConfig bc = tiny_config();
  bc.systems = {scl::SystemKind::logreg, scl::SystemKind::joint_mi};
  bc.seeds = 3;
  bc.comparisons = {{scl::SystemKind::joint_mi, scl::SystemKind::logreg}};
  const scl::BenchmarkReport report = scl::run_benchmark(domains, bc);
  CHECK_FALSE(report.welch.empty());
  for (const scl::WelchRow& w : report.welch) {
    CHECK(w.candidate == scl::SystemKind::joint_mi);
    CHECK(w.stats.p_value_one_tailed > 0.0);
    CHECK(w.stats.p_value_one_tailed < 1.0);
  }

  std::ostringstream welch_csv;
  scl::emit_welch_csv(report, welch_csv);
  CHECK(welch_csv.str().find("joint_mi") != std::string::npos);
}

TEST_CASE("overlap report writer") {
  scl::OverlapReport report;
  report.shared = {"good"};
  report.a_only = {"flat", "pages"};
  report.b_only = {"poor"};
  std::ostringstream out;
  scl::write_overlap_report(report, out);
  CHECK(out.str().find("shared 1\n") == 0);
  CHECK(out.str().find("a_only 2") != std::string::npos);
  CHECK(out.str().find("shared\tgood") != std::string::npos);
}
