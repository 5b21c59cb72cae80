#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rachbound/sim.hpp"
#include "rachbound/theta_search.hpp"
#include "rachbound/transient.hpp"

namespace rachbound::cli {

/// Bad or contradictory user input (exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable config or unwritable output (exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { bound_static, bound_partial, bound_full, oracle, simulate, dimension };

std::optional<Engine> parse_engine(std::string_view name);
std::string engine_name(Engine engine);

/// A target backlog written either as an integer or as a multiple of the
/// preamble count ("3M").
struct BacklogTarget {
  double per_preamble = 0.0;
  int absolute = 0;
  bool relative = false;

  int resolve(int preambles) const;
  std::string text() const;
};

struct RunSpec {
  std::optional<Engine> engine;
  std::vector<int> devices;
  std::vector<int> preambles;
  BarringPolicy policy = BarringPolicy::dynamic_optimal();
  BacklogKnowledge knowledge = BacklogKnowledge::exact;
  std::vector<BacklogTarget> targets;
  std::vector<int> slots;
  std::vector<double> eps;
  std::vector<double> c{3.0};
  ThetaSearch theta;
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  int t_max = 0;  // 0: largest t in the grid
  int workers = 1;
  double initial_estimate = -1.0;
  std::optional<double> slot_ms;
  std::string csv_path;
  std::string svg_path;

  /// Engine-specific completeness and consistency; throws InputError.
  void validate() const;
  int max_slots() const;
};

RunSpec parse_config_text(const std::string& text);
RunSpec parse_config(const std::filesystem::path& path);

}  // namespace rachbound::cli
