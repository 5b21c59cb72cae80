#include <doctest.h>

#include <cmath>

#include "rachbound/sim.hpp"
#include "rachbound/transient.hpp"

using namespace rachbound;

namespace {

ScenarioParams scenario(int n, int m) {
  ScenarioParams s;
  s.devices = n;
  s.preambles = m;
  return s;
}

BacklogDistribution at(int backlog) { return {0, Pmf::point(backlog)}; }

// |empirical - exact| within 3 binomial standard deviations (floor for p ~ 0).
bool within_3_sigma(double empirical, double exact, double samples) {
  const double sigma = std::sqrt(std::max(exact * (1.0 - exact), 1.0 / samples) / samples);
  return std::abs(empirical - exact) <= 3.0 * sigma;
}

}  // namespace

TEST_CASE("evolve: single-slot examples") {
  const auto lone = evolve(at(1), BarringPolicy::fixed(1.0), 5);
  CHECK(lone.slot == 1);
  CHECK(lone.pmf[0] == 1.0);

  const auto stuck = evolve(at(2), BarringPolicy::fixed(1.0), 1);
  CHECK(stuck.pmf[2] == 1.0);

  const auto half = evolve(at(2), BarringPolicy::fixed(0.5), 1);
  CHECK(half.pmf[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.pmf[2] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.pmf[0] == 0.0);
}

TEST_CASE("evolve: non-delta arrivals are rejected") {
  CHECK_THROWS_AS(evolve(at(2), BarringPolicy::fixed(1.0), 2, ArrivalModel::uniform),
                  UnsupportedArrivalModel);
  ScenarioParams s = scenario(10, 2);
  s.arrivals = ArrivalModel::beta;
  s.activation_span = 100;
  CHECK_THROWS_AS(backlog_distribution(s, BarringPolicy::dynamic_optimal(), 3),
                  UnsupportedArrivalModel);
}

TEST_CASE("scenario and policy validation") {
  CHECK_THROWS_AS(scenario(0, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(scenario(1, 0).validate(), std::invalid_argument);
  ScenarioParams s = scenario(5, 2);
  s.activation_span = 3;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(BarringPolicy::fixed(0.0), std::invalid_argument);
  CHECK_THROWS_AS(BarringPolicy::fixed(1.01), std::invalid_argument);
  CHECK(BarringPolicy::fixed(0.5).describe() == "static:0.5");
  CHECK(BarringPolicy::dynamic_optimal().describe() == "dynamic");
  CHECK(BarringPolicy::dynamic_optimal().probability(40, 10) == doctest::Approx(0.25));
}

TEST_CASE("backlog distribution: examples") {
  CHECK(backlog_distribution(scenario(1, 1), BarringPolicy::fixed(1.0), 1).pmf[0] == 1.0);
  const auto d = backlog_distribution(scenario(3, 2), BarringPolicy::fixed(1.0), 1);
  CHECK(d.pmf[2] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(d.pmf[3] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(backlog_distribution(scenario(7, 3), BarringPolicy::fixed(0.3), 0).pmf[7] == 1.0);
}

TEST_CASE("backlog distribution: agrees with the simulator (N=50, M=10, dynamic, t=40)") {
  const auto exact = backlog_distribution(scenario(50, 10), BarringPolicy::dynamic_optimal(), 40);
  SimConfig cfg;
  cfg.scenario = scenario(50, 10);
  cfg.max_slots = 40;
  const int samples = 1000000;
  std::vector<double> hist(51, 0.0);
  for (int s = 0; s < samples; ++s) {
    SampleRng rng = make_sample_rng(11, static_cast<std::uint64_t>(s));
    const auto traj = simulate_burst(cfg, rng);
    // The trajectory stops at B = 0; later slots keep B = 0.
    const int b = static_cast<int>(traj.backlog.size()) > 40 ? traj.backlog[40] : traj.backlog.back();
    hist[static_cast<std::size_t>(b)] += 1.0;
  }
  for (int b = 0; b <= 50; ++b) {
    CHECK(within_3_sigma(hist[static_cast<std::size_t>(b)] / samples, exact.pmf[b], samples));
  }
}

TEST_CASE("exact violation: examples") {
  CHECK(exact_violation(scenario(2, 1), BarringPolicy::fixed(1.0), 100, 0) == 1.0);
  for (int n : {1, 5, 17}) {
    CHECK(exact_violation(scenario(n, 3), BarringPolicy::fixed(0.4), 6, n) == 0.0);
    CHECK(exact_violation(scenario(n, 3), BarringPolicy::dynamic_optimal(), 0, n) == 0.0);
  }
  CHECK_THROWS_AS(exact_violation(scenario(5, 3), BarringPolicy::fixed(0.4), 6, 6),
                  std::invalid_argument);
}

TEST_CASE("exact violation: agrees with the simulator (N=20, M=10, dynamic, t=10, b=0)") {
  const double exact = exact_violation(scenario(20, 10), BarringPolicy::dynamic_optimal(), 10, 0);
  SimConfig cfg;
  cfg.scenario = scenario(20, 10);
  cfg.max_slots = 10;
  cfg.samples = 1000000;
  const int targets[] = {0};
  const auto h = resolution_histograms(cfg, targets).front();
  const double empirical = static_cast<double>(h.exceeding(10)) / static_cast<double>(h.samples);
  CHECK(exact > 0.0);
  CHECK(within_3_sigma(empirical, exact, 1e6));
}

TEST_CASE("properties: monotone resolution, mass conservation, shrinking support") {
  for (int m : {1, 3, 10}) {
    for (int n : {1, 8, 40}) {
      for (const auto& policy : {BarringPolicy::fixed(0.3), BarringPolicy::fixed(1.0),
                                 BarringPolicy::dynamic_optimal()}) {
        const auto traj = backlog_trajectory(scenario(n, m), policy, 60);
        REQUIRE(traj.size() == 61);
        for (std::size_t i = 0; i < traj.size(); ++i) {
          CHECK(traj[i].slot == static_cast<int>(i));
          CHECK(std::abs(traj[i].pmf.total() - 1.0) <= 1e-9);
          CHECK(traj[i].pmf.min_support() >= 0);
          CHECK(traj[i].pmf.max_support() <= n);
          if (i > 0) CHECK(traj[i].pmf.max_support() <= traj[i - 1].pmf.max_support());
        }
        for (int b : {0, n / 2}) {
          const auto curve = violation_curve(scenario(n, m), policy, 60, b);
          for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] <= curve[i - 1] + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("properties: more preambles never hurt under static barring") {
  for (double p : {0.2, 0.6, 1.0}) {
    for (int n : {5, 20}) {
      for (int m = 1; m < 6; ++m) {
        const auto fewer = violation_curve(scenario(n, m), BarringPolicy::fixed(p), 40, 0);
        const auto more = violation_curve(scenario(n, m + 1), BarringPolicy::fixed(p), 40, 0);
        for (std::size_t i = 0; i < fewer.size(); ++i) CHECK(more[i] <= fewer[i] + 1e-12);
      }
    }
  }
}

TEST_CASE("cumulative service: examples and complement of the backlog") {
  CHECK(cumulative_service_dist(scenario(2, 1), 1.0, 5)[0] == 1.0);
  CHECK(cumulative_service_dist(scenario(1, 4), 1.0, 1)[1] == 1.0);
  const Pmf s = cumulative_service_dist(scenario(3, 2), 1.0, 1);
  CHECK(s[1] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(s[0] == doctest::Approx(0.25).epsilon(1e-14));

  for (int t : {0, 1, 4, 15}) {
    const auto b = backlog_distribution(scenario(25, 4), BarringPolicy::fixed(0.35), t);
    const Pmf srv = cumulative_service_dist(scenario(25, 4), 0.35, t);
    for (int k = 0; k <= 25; ++k) CHECK(srv[k] == b.pmf[25 - k]);
  }
}

TEST_CASE("first passage: examples") {
  const Pmf one = first_passage_dist(1, 0, BarringPolicy::fixed(1.0), 5, 10);
  CHECK(one[1] == 1.0);
  CHECK_FALSE(one.partial());

  const Pmf never = first_passage_dist(2, 0, BarringPolicy::fixed(1.0), 1, 50);
  CHECK(never.total() == 0.0);
  CHECK(never.residual() == doctest::Approx(1.0));

  CHECK_THROWS_AS(first_passage_dist(3, 3, BarringPolicy::fixed(1.0), 2, 10), std::invalid_argument);
  CHECK_THROWS_AS(first_passage_dist(3, 0, BarringPolicy::fixed(1.0), 2, 0), std::invalid_argument);
}

TEST_CASE("first passage: tail equals the violation curve") {
  const auto policy = BarringPolicy::dynamic_optimal();
  const Pmf fp = first_passage_dist(30, 4, policy, 10, 80);
  const auto curve = violation_curve(scenario(30, 10), policy, 80, 4);
  for (int t = 0; t <= 80; ++t) {
    CHECK(fp.tail_above(t) + fp.residual() == doctest::Approx(curve[static_cast<std::size_t>(t)]).epsilon(1e-9));
  }
}

TEST_CASE("first passage: agrees with the simulator hitting-time histogram") {
  const Pmf fp = first_passage_dist(30, 0, BarringPolicy::dynamic_optimal(), 10, 200);
  CHECK(fp.residual() < 1e-12);
  SimConfig cfg;
  cfg.scenario = scenario(30, 10);
  cfg.max_slots = 200;
  cfg.samples = 1000000;
  const int targets[] = {0};
  const auto h = resolution_histograms(cfg, targets).front();
  CHECK(h.censored == 0);
  for (int t = 0; t <= 200; ++t) {
    CHECK(within_3_sigma(static_cast<double>(h.counts[static_cast<std::size_t>(t)]) / 1e6, fp[t], 1e6));
  }
}

TEST_CASE("first passage: automatic horizon") {
  CHECK(first_passage_horizon_cap(100, 10) == 10 * 28);
  const Pmf fp = first_passage_dist(60, 0, BarringPolicy::dynamic_optimal(), 10);
  CHECK(fp.residual() < 1e-12);
  CHECK(fp.max_support() <= first_passage_horizon_cap(60, 10));
  const Pmf stuck = first_passage_dist(2, 0, BarringPolicy::fixed(1.0), 1);
  CHECK(stuck.residual() == doctest::Approx(1.0));
  CHECK(stuck.max_support() == first_passage_horizon_cap(2, 1));
}
