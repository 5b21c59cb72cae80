#include <doctest.h>

#include <stdexcept>

#include "rachbound/pmf.hpp"

using rachbound::Pmf;

TEST_CASE("pmf: point mass and lookups") {
  const Pmf p = Pmf::point(7);
  CHECK(p[7] == 1.0);
  CHECK(p[6] == 0.0);
  CHECK(p.mean() == 7.0);
  CHECK(p.tail_above(6) == 1.0);
  CHECK(p.tail_above(7) == 0.0);
  CHECK_FALSE(p.partial());
}

TEST_CASE("pmf: rejects negative or non-finite masses") {
  CHECK_THROWS_AS(Pmf(0, {0.5, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf(0, {1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("pmf: trimming renormalizes only negligible tails") {
  const Pmf small_tail(0, {0.5, 0.5 - 2e-16, 1e-16, 1e-16});
  const Pmf t = small_tail.trimmed();
  CHECK(t.max_support() == 1);
  CHECK(t.total() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(t.partial());

  // Many sub-threshold masses adding up past 1e-12 are kept as residual.
  std::vector<double> masses{1.0 - 5e-12};
  for (int i = 0; i < 10000; ++i) masses.push_back(5e-16);
  const Pmf big_tail(0, masses);
  const Pmf u = big_tail.trimmed();
  CHECK(u.max_support() == 0);
  CHECK(u.partial());
  CHECK(u.residual() == doctest::Approx(5e-12).epsilon(1e-6));
  CHECK(u.total() + u.residual() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pmf: compensated sum survives cancellation-prone inputs") {
  std::vector<double> v{1.0};
  for (int i = 0; i < 100000; ++i) v.push_back(1e-17);
  CHECK(rachbound::compensated_sum(v) == doctest::Approx(1.0 + 1e-12).epsilon(1e-15));
}
