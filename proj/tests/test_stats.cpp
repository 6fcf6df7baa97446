#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "scl/diagnostics.hpp"
#include "scl/rng.hpp"
#include "scl/stats.hpp"

TEST_CASE("accuracy") {
  CHECK(scl::accuracy({1, 0, 1}, {1, 0, 1}) == 1.0);
  CHECK(scl::accuracy({1, 0, 1, 0}, {1, 1, 1, 1}) == 0.5);
  CHECK_THROWS_AS(scl::accuracy({1}, {1, 0}), scl::InvalidArgument);
  CHECK_THROWS_AS(scl::accuracy({}, {}), scl::InvalidArgument);

  // accuracy = 1 - hamming/length
  scl::rng::Engine eng = scl::rng::make_engine(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t len = 1 + scl::rng::next_below(eng, 50);
    std::vector<int> a(len), b(len);
    std::size_t hamming = 0;
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = scl::rng::next_below(eng, 2);
      b[i] = scl::rng::next_below(eng, 2);
      hamming += a[i] != b[i];
    }
    CHECK(scl::accuracy(a, b) ==
          Catch::Approx(1.0 - static_cast<double>(hamming) / len).margin(1e-15));
  }
}

TEST_CASE("t distribution survival function against quadrature") {
  for (double df : {1.0, 2.0, 5.0, 10.0, 18.0, 30.0}) {
    for (double t = -10.0; t <= 10.0; t += 0.5) {
      const double mine = scl::student_t_sf(t, df);
      const double ref = scl::diagnostics::t_sf_reference(t, df);
      INFO("t=" << t << " df=" << df);
      CHECK(mine == Catch::Approx(ref).margin(1e-8));
    }
  }
  CHECK(scl::student_t_sf(0.0, 7.0) == 0.5);  // exact: I_1(a,b) = 1
}

TEST_CASE("identical samples give t = 0 and p = 0.5") {
  const scl::WelchResult r = scl::welch_one_tailed({0.5, 0.6, 0.7}, {0.5, 0.6, 0.7});
  CHECK(r.t_statistic == 0.0);
  CHECK(r.p_value_one_tailed == 0.5);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("welch on clearly separated samples") {
  const std::vector<double> a = {0.80, 0.82, 0.81};
  const std::vector<double> b = {0.70, 0.72, 0.71};
  const scl::WelchResult r = scl::welch_one_tailed(a, b);
  CHECK(r.t_statistic == Catch::Approx(12.24744871).epsilon(1e-8));
  CHECK(r.degrees_of_freedom == Catch::Approx(4.0).epsilon(1e-10));
  CHECK(r.p_value_one_tailed < 0.01);
  // cross-check the p-value against the quadrature reference
  CHECK(r.p_value_one_tailed ==
        Catch::Approx(scl::diagnostics::t_sf_reference(r.t_statistic, r.degrees_of_freedom))
            .margin(1e-10));
}

TEST_CASE("welch antisymmetry and tail complement") {
  scl::rng::Engine eng = scl::rng::make_engine(1729);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t na = 2 + scl::rng::next_below(eng, 9);
    const std::size_t nb = 2 + scl::rng::next_below(eng, 9);
    std::vector<double> a(na), b(nb);
    for (double& x : a) x = scl::rng::next_unit(eng);
    for (double& x : b) x = scl::rng::next_unit(eng);

    const scl::WelchResult fwd = scl::welch_one_tailed(a, b);
    const scl::WelchResult rev = scl::welch_one_tailed(b, a);
    CHECK(fwd.t_statistic == Catch::Approx(-rev.t_statistic).margin(1e-12));
    CHECK(fwd.degrees_of_freedom == Catch::Approx(rev.degrees_of_freedom).margin(1e-10));
    CHECK(fwd.p_value_one_tailed + rev.p_value_one_tailed == Catch::Approx(1.0).margin(1e-10));
    CHECK(fwd.p_value_one_tailed > 0.0);
    CHECK(fwd.p_value_one_tailed < 1.0);
    CHECK(fwd.degrees_of_freedom > 0.0);
  }
}

TEST_CASE("t statistic is invariant to scaling deviations around a common mean") {
  const std::vector<double> base_a = {0.7, 0.75, 0.8}, base_b = {0.6, 0.65, 0.7};
  const scl::WelchResult r1 = scl::welch_one_tailed(base_a, base_b);

  // scale both samples' deviations from the common mean by the same factor
  const double mean = 0.7;
  const double factor = 3.0;
  std::vector<double> scaled_a, scaled_b;
  for (double x : base_a) scaled_a.push_back(mean + factor * (x - mean));
  for (double x : base_b) scaled_b.push_back(mean + factor * (x - mean));
  const scl::WelchResult r2 = scl::welch_one_tailed(scaled_a, scaled_b);
  CHECK(r1.t_statistic == Catch::Approx(r2.t_statistic).margin(1e-10));
}

TEST_CASE("degenerate welch inputs") {
  const scl::WelchResult equal = scl::welch_one_tailed({0.5, 0.5}, {0.5, 0.5});
  CHECK(equal.degenerate);
  CHECK(equal.p_value_one_tailed == 0.5);

  CHECK_THROWS_AS(scl::welch_one_tailed({0.5, 0.5}, {0.6, 0.6}), scl::InvalidArgument);
  CHECK_THROWS_AS(scl::welch_one_tailed({0.5}, {0.6, 0.6}), scl::InvalidArgument);
}

TEST_CASE("incomplete beta sanity") {
  CHECK(scl::reg_inc_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(scl::reg_inc_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1,1) = x
  for (double x = 0.1; x < 1.0; x += 0.2)
    CHECK(scl::reg_inc_beta(1.0, 1.0, x) == Catch::Approx(x).margin(1e-12));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  CHECK(scl::reg_inc_beta(2.5, 4.0, 0.3) ==
        Catch::Approx(1.0 - scl::reg_inc_beta(4.0, 2.5, 0.7)).margin(1e-12));
}
