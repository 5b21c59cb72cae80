#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rachbound/compare.hpp"
#include "rachbound/config.hpp"
#include "rachbound/run.hpp"

namespace cli = rachbound::cli;

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  bool svg = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  std::optional<int> workers;
  std::optional<double> slot_ms;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "run configuration (INI)")->required();
  app->add_option("--out", f.out, "CSV output path (default: [output] csv, else stdout)");
  app->add_flag("--svg", f.svg, "also write an SVG chart ([output] svg, else <out>.svg)");
  app->add_option("--seed", f.seed, "simulation base seed");
  app->add_option("--samples", f.samples, "simulation sample count");
  app->add_option("--workers", f.workers, "simulation worker threads");
  app->add_option("--slot-ms", f.slot_ms, "PRACH slot duration; adds a t_ms column value");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content) || !(out.flush())) {
    throw cli::IoError("cannot write '" + path + "'");
  }
}

int run_engine(cli::Engine engine, const CommonFlags& f) {
  cli::RunSpec spec = cli::parse_config(f.config);
  if (spec.engine && *spec.engine != engine) {
    throw cli::InputError("config declares engine '" + cli::engine_name(*spec.engine) +
                          "' but the command is '" + cli::engine_name(engine) + "'");
  }
  spec.engine = engine;
  if (f.seed) spec.seed = *f.seed;
  if (f.samples) spec.samples = *f.samples;
  if (f.workers) spec.workers = *f.workers;
  if (f.slot_ms) spec.slot_ms = *f.slot_ms;
  if (!f.out.empty()) spec.csv_path = f.out;

  std::string svg_path;
  if (f.svg) {
    svg_path = spec.svg_path;
    if (svg_path.empty() && !spec.csv_path.empty()) {
      svg_path = std::filesystem::path(spec.csv_path).replace_extension(".svg").string();
    }
    if (svg_path.empty()) throw cli::InputError("--svg needs --out or '[output] svg'");
  }

  const auto outcome = cli::run(spec);
  for (const auto& d : outcome.diagnostics) std::cerr << d << '\n';

  std::ostringstream csv;
  cli::write_csv(csv, outcome.rows);
  if (spec.csv_path.empty()) {
    std::cout << csv.str();
  } else {
    write_file(spec.csv_path, csv.str());
  }
  if (!svg_path.empty()) write_file(svg_path, cli::render_svg(cli::make_chart(outcome.rows)));
  return outcome.exit_code;
}

std::vector<cli::ResultRow> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cli::IoError("cannot read '" + path + "'");
  return cli::read_csv(in);
}

int run_compare(const std::string& bound_path, const std::string& reference_path) {
  const auto report = cli::compare_tables(load_csv(bound_path), load_csv(reference_path));
  for (const auto& line : report.lines) std::cout << line << '\n';
  std::cout << "matched " << report.matched << ", checked " << report.checked << ", failures "
            << report.failures << ", informational " << report.informational_failures
            << ", max margin " << cli::format_double(report.max_margin) << '\n';
  if (report.failures > 0) {
    std::cout << "dominance FAILED\n";
  } else if (report.informational_failures > 0) {
    std::cout << "dominance does not hold against estimated-backlog simulation (expected)\n";
  } else {
    std::cout << "dominance holds\n";
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic burst-resolution bounds for random access with access class barring"};
  app.require_subcommand(1);

  const std::pair<const char*, const char*> verbs[] = {
      {"bound-static", "violation or backlog bounds under static barring"},
      {"bound-partial", "violation bound for partial resolution (b_eps >= M), dynamic barring"},
      {"bound-full", "violation bound for full resolution (b_eps = 0), dynamic barring"},
      {"oracle", "exact transient violation probability"},
      {"simulate", "Monte-Carlo violation probability with 99% Clopper-Pearson intervals"},
      {"dimension", "largest device count meeting a QoS requirement"},
  };
  CommonFlags flags;
  std::optional<cli::Engine> chosen;
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    sub->callback([&chosen, name = std::string(name)] { chosen = cli::parse_engine(name); });
  }
  std::string bound_csv;
  std::string reference_csv;
  CLI::App* compare = app.add_subcommand("compare", "check a bound CSV against a simulate/oracle CSV");
  compare->add_option("bound", bound_csv, "CSV from a bound-* engine")->required();
  compare->add_option("reference", reference_csv, "CSV from simulate or oracle")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInvalidInput;
  }

  try {
    if (compare->parsed()) return run_compare(bound_csv, reference_csv);
    return run_engine(*chosen, flags);
  } catch (const cli::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitIo;
  } catch (const cli::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitInvalidInput;
  }
}
