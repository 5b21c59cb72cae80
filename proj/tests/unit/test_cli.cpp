#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rachbound/compare.hpp"
#include "rachbound/config.hpp"
#include "rachbound/csv.hpp"
#include "rachbound/run.hpp"
#include "rachbound/svg.hpp"

using namespace rachbound;
using namespace rachbound::cli;

namespace {

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "rachbound_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_config(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI binary and returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + RACHBOUND_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kStatic = R"(engine = bound-static
[scenario]
devices = 20
preambles = 10
[policy]
kind = static
p = 0.5     # inline comments are allowed
[qos]
b_eps = 0, 5
t = 10
)";

}  // namespace

TEST_CASE("config: minimal static-bound file") {
  const RunSpec spec = parse_config_text(kStatic);
  CHECK(spec.engine == Engine::bound_static);
  CHECK(spec.devices == std::vector<int>{20});
  CHECK(spec.preambles == std::vector<int>{10});
  CHECK(spec.policy == BarringPolicy::fixed(0.5));
  REQUIRE(spec.targets.size() == 2);
  CHECK(spec.targets[1].resolve(10) == 5);
  CHECK(spec.slots == std::vector<int>{10});
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("config: invalid values name the offending key") {
  std::string bad = kStatic;
  bad.replace(bad.find("p = 0.5"), 7, "p = 1.5");
  try {
    parse_config_text(bad);
    FAIL("p = 1.5 was accepted");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("policy.p") != std::string::npos);
    CHECK(std::string(e.what()).find("(0, 1]") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("[scenario]\nbogus = 3\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("[nowhere]\nx = 3\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("[qos]\nt = 10:5\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("[qos]\nt = ten\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("[policy]\nkind = dynamic\np = 0.3\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("[scenario]\narrivals = uniform\n"), InputError);
}

TEST_CASE("config: engine-specific consistency") {
  const std::string partial =
      "engine = bound-partial\n[scenario]\ndevices = 100\npreambles = 10\n[qos]\nb_eps = 5\nt = 1:3\n";
  try {
    parse_config_text(partial).validate();
    FAIL("b_eps < M accepted for the partial bound");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("bound-full") != std::string::npos);
  }
  const std::string est_static =
      "engine = simulate\n[scenario]\ndevices = 10\npreambles = 2\n[policy]\nkind = static\n"
      "p = 0.5\nknowledge = estimated\n[qos]\nb_eps = 0\nt = 5\n";
  CHECK_THROWS_AS(parse_config_text(est_static).validate(), InputError);
  const std::string fits = "engine = oracle\n[scenario]\ndevices = 10\npreambles = 2\n[qos]\nb_eps = 3M\nt = 5\n";
  CHECK_NOTHROW(parse_config_text(fits).validate());
  const std::string over = "engine = oracle\n[scenario]\ndevices = 10\npreambles = 4\n[qos]\nb_eps = 3M\nt = 5\n";
  CHECK_THROWS_AS(parse_config_text(over).validate(), InputError);
}

TEST_CASE("config: the partial-resolution recipe") {
  const RunSpec spec = parse_config(std::filesystem::path(RACHBOUND_RECIPE_DIR) / "fig3_bound.ini");
  CHECK(spec.engine == Engine::bound_partial);
  CHECK(spec.devices == std::vector<int>{1000});
  CHECK(spec.preambles == std::vector<int>{10, 20});
  CHECK_FALSE(spec.policy.is_static());
  REQUIRE(spec.targets.size() == 1);
  CHECK(spec.targets[0].resolve(10) == 30);
  CHECK(spec.targets[0].resolve(20) == 60);
  CHECK(spec.slots.front() == 0);
  CHECK(spec.slots.back() == 600);
  CHECK(spec.slots.size() == 121);
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("config: every shipped recipe validates") {
  for (const auto& entry : std::filesystem::directory_iterator(RACHBOUND_RECIPE_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_config(entry.path()).validate());
  }
}

TEST_CASE("csv: rows round-trip through parse and serialize") {
  ResultRow r;
  r.engine = "simulate";
  r.devices = 1000;
  r.preambles = 20;
  r.policy = "static:0.35";
  r.c = 4.5;
  r.b_eps = 60;
  r.t = 137;
  r.eps = 1e-3;
  r.value = 0.1 + 0.2;
  r.theta_star = 1.0 / 3.0;
  r.ci_low = 2.5e-300;
  r.ci_high = 0.999999999999;
  r.samples = 100000;
  r.seed = 18446744073709551615ULL;
  r.status = "clamped";
  r.t_ms = 1370.0;
  const std::string line = to_csv_line(r);
  CHECK(parse_csv_line(line) == r);
  CHECK(to_csv_line(parse_csv_line(line)) == line);

  ResultRow sparse;
  sparse.engine = "oracle";
  sparse.t = 0;
  CHECK(to_csv_line(parse_csv_line(to_csv_line(sparse))) == to_csv_line(sparse));
  CHECK_THROWS_AS(parse_csv_line("a,b"), InputError);
  CHECK_THROWS_AS(parse_csv_line("oracle,x,,,,,,,,,,,,,ok,"), InputError);

  std::stringstream table;
  write_csv(table, {r, sparse});
  const auto back = read_csv(table);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == r);
  CHECK(back[1] == sparse);
}

TEST_CASE("run: oracle rows cover t = 0..max(t)") {
  const RunSpec spec = parse_config_text(
      "engine = oracle\n[scenario]\ndevices = 20\npreambles = 10\n[policy]\nkind = static\np = 0.5\n"
      "[qos]\nb_eps = 0\nt = 50\n");
  const auto out = run(spec);
  REQUIRE(out.rows.size() == 51);
  CHECK(out.exit_code == kExitOk);
  for (int t = 0; t <= 50; ++t) CHECK(out.rows[static_cast<std::size_t>(t)].t == t);
  CHECK(out.rows.front().value == 1.0);
}

TEST_CASE("run: static bounds dominate the oracle rows and compare agrees") {
  RunSpec spec = parse_config_text(kStatic);
  spec.slots = {0, 5, 10, 20, 40};
  const auto bounds = run(spec);
  spec.engine = Engine::oracle;
  const auto exact = run(spec);
  const auto report = compare_tables(bounds.rows, exact.rows);
  CHECK(report.failures == 0);
  CHECK(report.checked == 10);
  CHECK(report.exit_code == kExitOk);
}

TEST_CASE("compare: all-one bound trivially dominates; key mismatch is an input error") {
  ResultRow bound;
  bound.engine = "bound-full";
  bound.devices = 100;
  bound.preambles = 10;
  bound.policy = "dynamic";
  bound.b_eps = 0;
  bound.value = 1.0;
  ResultRow sim = bound;
  sim.engine = "simulate";
  sim.samples = 1000;
  sim.value = 0.5;
  sim.ci_low = 0.45;
  sim.ci_high = 0.55;
  std::vector<ResultRow> bounds;
  std::vector<ResultRow> sims;
  for (int t = 0; t < 5; ++t) {
    bound.t = t;
    sim.t = t;
    bounds.push_back(bound);
    sims.push_back(sim);
  }
  auto report = compare_tables(bounds, sims);
  CHECK(report.checked == 5);
  CHECK(report.failures == 0);

  for (auto& b : bounds) b.value = 0.5;
  report = compare_tables(bounds, sims);
  CHECK(report.failures == 5);
  CHECK(report.exit_code == kExitDominanceFailure);

  for (auto& s : sims) s.policy = "dynamic-est";
  report = compare_tables(bounds, sims);
  CHECK(report.failures == 0);
  CHECK(report.informational_failures == 5);
  CHECK(report.exit_code == kExitOk);

  for (auto& s : sims) s.preambles = 20;
  CHECK_THROWS_AS(compare_tables(bounds, sims), InputError);
}

TEST_CASE("svg: self-contained chart with legend") {
  Chart chart;
  chart.title = "t < 5 & more";
  chart.log_y = true;
  chart.series.push_back({"bound", {{0, 1.0}, {10, 1e-3}, {20, 0.0}}, false});
  chart.series.push_back({"sim", {{0, 1.0}, {10, 1e-4}}, true});
  const std::string svg = render_svg(chart);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("&lt; 5 &amp;") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("NaN") == std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);
}

TEST_CASE("binary: exit codes and byte-identical simulation output") {
  const auto dir = scratch();
  const auto sim = write_config("sim.ini",
                                "engine = simulate\n[scenario]\ndevices = 60\npreambles = 5\n[qos]\n"
                                "b_eps = 0, 3M\nt = 0:40:2\n[simulate]\nsamples = 2000\nseed = 12\n");
  const auto a = dir / "a.csv";
  const auto b = dir / "b.csv";
  REQUIRE(run_cli("simulate --config \"" + sim.string() + "\" --out \"" + a.string() + "\"") == 0);
  REQUIRE(run_cli("simulate --config \"" + sim.string() + "\" --out \"" + b.string() + "\" --workers 4") == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run_cli("simulate --config \"" + sim.string() + "\" --out \"" + b.string() + "\" --seed 13") == 0);
  CHECK(slurp(a) != slurp(b));

  const auto bad = write_config("bad.ini", "engine = bound-static\n[policy]\nkind = static\np = 1.5\n");
  CHECK(run_cli("bound-static --config \"" + bad.string() + "\"") == kExitInvalidInput);
  CHECK(run_cli("oracle --config \"" + sim.string() + "\"") == kExitInvalidInput);
  CHECK(run_cli("oracle --config \"" + (dir / "missing.ini").string() + "\"") == kExitIo);
  CHECK(run_cli("simulate --config \"" + sim.string() + "\" --out /nonexistent/dir/x.csv") == kExitIo);
  CHECK(run_cli("no-such-verb") == kExitInvalidInput);

  // A theta window that ends far too early leaves the minimizer on the edge.
  const auto narrow = write_config(
      "narrow.ini",
      "engine = bound-partial\n[scenario]\ndevices = 1000\npreambles = 10\n[qos]\nb_eps = 30\n"
      "t = 400\n[theta]\nmin = 1e-4\nmax = 0.2\n");
  CHECK(run_cli("bound-partial --config \"" + narrow.string() + "\" --out \"" + (dir / "n.csv").string() + "\"") ==
        kExitNotConverged);

  const auto full = write_config(
      "full.ini",
      "engine = bound-full\n[scenario]\ndevices = 60\npreambles = 5\n[qos]\nt = 0:40:2\n");
  const auto f = dir / "full.csv";
  REQUIRE(run_cli("bound-full --config \"" + full.string() + "\" --out \"" + f.string() + "\" --svg --slot-ms 5") == 0);
  CHECK(std::filesystem::exists(dir / "full.svg"));
  CHECK(run_cli("compare \"" + f.string() + "\" \"" + a.string() + "\"") == kExitOk);
  std::ifstream in(f);
  const auto rows = read_csv(in);
  REQUIRE(rows.size() == 21);
  CHECK(rows[3].t_ms == 30.0);
}
