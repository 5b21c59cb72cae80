#include "rachbound/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace rachbound::cli {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario", {"devices", "preambles", "arrivals", "activation_span"}},
      {"policy", {"kind", "p", "knowledge"}},
      {"qos", {"b_eps", "t", "eps"}},
      {"split", {"c"}},
      {"theta", {"min", "max", "grid", "tolerance"}},
      {"simulate", {"samples", "seed", "t_max", "workers", "initial_estimate"}},
      {"output", {"csv", "svg", "slot_ms"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Values may carry a trailing "# comment".
std::string clean_value(const std::string& raw) { return trim(raw.substr(0, raw.find('#'))); }

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return v;
}

// Comma-separated integers and inclusive ranges start:stop[:step].
std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) {
    if (item.find(':') == std::string::npos) {
      out.push_back(parse_number<int>(item, key));
      continue;
    }
    std::vector<int> parts;
    std::istringstream in(item);
    std::string part;
    while (std::getline(in, part, ':')) parts.push_back(parse_number<int>(trim(part), key));
    if (parts.size() < 2 || parts.size() > 3) {
      throw InputError("key '" + key + "': range '" + item + "' must be start:stop or start:stop:step");
    }
    const int step = parts.size() == 3 ? parts[2] : 1;
    if (step < 1 || parts[1] < parts[0]) {
      throw InputError("key '" + key + "': range '" + item + "' needs start <= stop and step >= 1");
    }
    for (int v = parts[0]; v <= parts[1]; v += step) out.push_back(v);
  }
  if (out.empty()) throw InputError("key '" + key + "' is empty");
  return out;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_number<double>(item, key));
  if (out.empty()) throw InputError("key '" + key + "' is empty");
  return out;
}

BacklogTarget parse_target(const std::string& item) {
  BacklogTarget t;
  if (!item.empty() && (item.back() == 'M' || item.back() == 'm')) {
    const std::string factor = trim(item.substr(0, item.size() - 1));
    t.relative = true;
    t.per_preamble = factor.empty() ? 1.0 : parse_number<double>(factor, "qos.b_eps");
    if (!(t.per_preamble >= 0.0)) throw InputError("key 'qos.b_eps': multiple of M must be >= 0");
  } else {
    t.absolute = parse_number<int>(item, "qos.b_eps");
    if (t.absolute < 0) throw InputError("key 'qos.b_eps': target backlog must be >= 0");
  }
  return t;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

}  // namespace

std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "bound-static") return Engine::bound_static;
  if (name == "bound-partial") return Engine::bound_partial;
  if (name == "bound-full") return Engine::bound_full;
  if (name == "oracle") return Engine::oracle;
  if (name == "simulate") return Engine::simulate;
  if (name == "dimension") return Engine::dimension;
  return std::nullopt;
}

std::string engine_name(Engine engine) {
  switch (engine) {
    case Engine::bound_static: return "bound-static";
    case Engine::bound_partial: return "bound-partial";
    case Engine::bound_full: return "bound-full";
    case Engine::oracle: return "oracle";
    case Engine::simulate: return "simulate";
    case Engine::dimension: return "dimension";
  }
  return "?";
}

int BacklogTarget::resolve(int preambles) const {
  return relative ? static_cast<int>(std::ceil(per_preamble * preambles - 1e-9)) : absolute;
}

std::string BacklogTarget::text() const {
  if (!relative) return std::to_string(absolute);
  std::ostringstream out;
  out << per_preamble << 'M';
  return out.str();
}

int RunSpec::max_slots() const {
  return slots.empty() ? 0 : *std::max_element(slots.begin(), slots.end());
}

void RunSpec::validate() const {
  require(engine.has_value(), "no engine given: set 'engine' or use an engine verb");
  const Engine e = *engine;
  const bool dimensioning = e == Engine::dimension;

  require(!preambles.empty(), "key 'scenario.preambles' is required");
  for (int m : preambles) require(m >= 1, "key 'scenario.preambles': M must be >= 1");
  if (dimensioning) {
    require(devices.empty(), "key 'scenario.devices' is not used by the dimension engine (it searches N)");
  } else {
    require(!devices.empty(), "key 'scenario.devices' is required");
    for (int n : devices) require(n >= 1, "key 'scenario.devices': N must be >= 1");
  }

  require(!slots.empty(), "key 'qos.t' is required");
  for (int t : slots) require(t >= 0, "key 'qos.t': slot counts must be >= 0");
  for (double x : eps) require(x > 0.0 && x < 1.0, "key 'qos.eps': eps must lie in (0, 1)");
  for (double x : c) require(x > 1.0 && std::isfinite(x), "key 'split.c': c must be > 1");
  try {
    theta.validate();
  } catch (const std::invalid_argument& ex) {
    throw InputError(std::string("[theta]: ") + ex.what());
  }

  const bool needs_dynamic =
      e == Engine::bound_partial || e == Engine::bound_full || e == Engine::dimension;
  if (needs_dynamic) {
    require(!policy.is_static(), "engine " + engine_name(e) +
                                     " analyzes the dynamic policy; set 'policy.kind = dynamic'");
  }
  if (e == Engine::bound_static) {
    require(policy.is_static(), "engine bound-static needs 'policy.kind = static' and 'policy.p'");
  }
  if (knowledge == BacklogKnowledge::estimated) {
    require(e == Engine::simulate, "'policy.knowledge = estimated' is only meaningful for simulate");
    require(!policy.is_static(), "'policy.knowledge = estimated' requires the dynamic policy");
  }

  auto each_target = [&](auto&& check) {
    for (int m : preambles) {
      for (const auto& target : targets) check(target.resolve(m), m, target);
    }
  };
  switch (e) {
    case Engine::bound_static:
    case Engine::oracle:
      require(!targets.empty() || !eps.empty(),
              "engine " + engine_name(e) + " needs 'qos.b_eps' (violation) or 'qos.eps' (backlog)");
      break;
    case Engine::simulate:
      require(!targets.empty(), "engine simulate needs 'qos.b_eps'");
      require(samples >= 100, "key 'simulate.samples' must be >= 100");
      require(workers >= 1, "key 'simulate.workers' must be >= 1");
      require(t_max == 0 || t_max >= max_slots(), "key 'simulate.t_max' must cover every t in 'qos.t'");
      break;
    case Engine::bound_partial:
      require(!targets.empty(), "engine bound-partial needs 'qos.b_eps'");
      each_target([&](int b, int m, const BacklogTarget& t) {
        require(b >= m, "key 'qos.b_eps' = " + t.text() + " is below M = " + std::to_string(m) +
                            ": the partial bound needs b_eps >= M; use bound-full for b_eps = 0");
      });
      break;
    case Engine::bound_full:
      each_target([&](int b, int, const BacklogTarget& t) {
        require(b == 0, "engine bound-full is for b_eps = 0 (got " + t.text() +
                            "); use bound-partial for b_eps >= M");
      });
      break;
    case Engine::dimension:
      require(!eps.empty(), "engine dimension needs 'qos.eps'");
      for (int t : slots) require(t >= 1, "key 'qos.t': dimensioning deadlines must be >= 1");
      each_target([&](int b, int m, const BacklogTarget& t) {
        require(b == 0 || b >= m, "key 'qos.b_eps' = " + t.text() +
                                      ": dimensioning supports b_eps = 0 or b_eps >= M");
      });
      break;
  }
  if (!dimensioning) {
    for (int n : devices) {
      each_target([&](int b, int, const BacklogTarget& t) {
        require(b <= n, "key 'qos.b_eps' = " + t.text() + " exceeds N = " + std::to_string(n));
      });
    }
  }
  if (slot_ms) require(*slot_ms > 0.0, "slot duration must be > 0 ms");
}

RunSpec parse_config_text(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& ex) {
    throw InputError("config syntax: " + ex.message() + " (line " + std::to_string(ex.line()) + ")");
  }

  std::map<std::string, std::string> values;  // "section.key" -> cleaned value
  for (const auto& [name, node] : tree) {
    if (node.empty() && !known_keys().contains(name)) {
      require(name == "engine", "unknown top-level key '" + name + "' (only 'engine' is allowed)");
      values["engine"] = clean_value(node.data());
      continue;
    }
    const auto section = known_keys().find(name);
    require(section != known_keys().end(), "unknown section [" + name + "]");
    for (const auto& [key, leaf] : node) {
      require(section->second.contains(key), "unknown key '" + key + "' in [" + name + "]");
      values[name + "." + key] = clean_value(leaf.data());
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };

  RunSpec spec;
  if (auto v = get("engine")) {
    spec.engine = parse_engine(*v);
    require(spec.engine.has_value(), "key 'engine': unknown engine '" + *v + "'");
  }
  if (auto v = get("scenario.devices")) spec.devices = parse_int_list(*v, "scenario.devices");
  if (auto v = get("scenario.preambles")) spec.preambles = parse_int_list(*v, "scenario.preambles");
  if (auto v = get("scenario.arrivals")) {
    require(*v == "delta", "key 'scenario.arrivals': only 'delta' arrivals are analyzed (got '" +
                               *v + "')");
  }
  if (auto v = get("scenario.activation_span")) {
    require(parse_number<int>(*v, "scenario.activation_span") == 0,
            "key 'scenario.activation_span' must be 0 for delta arrivals");
  }

  const auto kind = get("policy.kind").value_or("dynamic");
  if (kind == "static") {
    const auto p = get("policy.p");
    require(p.has_value(), "key 'policy.p' is required for 'policy.kind = static'");
    const double prob = parse_number<double>(*p, "policy.p");
    require(prob > 0.0 && prob <= 1.0, "key 'policy.p' = " + *p + " must lie in (0, 1]");
    spec.policy = BarringPolicy::fixed(prob);
  } else if (kind == "dynamic") {
    require(!get("policy.p"), "key 'policy.p' contradicts 'policy.kind = dynamic'");
    spec.policy = BarringPolicy::dynamic_optimal();
  } else {
    throw InputError("key 'policy.kind' must be 'static' or 'dynamic' (got '" + kind + "')");
  }
  if (auto v = get("policy.knowledge")) {
    if (*v == "exact") {
      spec.knowledge = BacklogKnowledge::exact;
    } else if (*v == "estimated") {
      spec.knowledge = BacklogKnowledge::estimated;
    } else {
      throw InputError("key 'policy.knowledge' must be 'exact' or 'estimated' (got '" + *v + "')");
    }
  }

  if (auto v = get("qos.b_eps")) {
    for (const auto& item : split_list(*v)) spec.targets.push_back(parse_target(item));
  }
  if (auto v = get("qos.t")) spec.slots = parse_int_list(*v, "qos.t");
  if (auto v = get("qos.eps")) spec.eps = parse_double_list(*v, "qos.eps");
  if (auto v = get("split.c")) spec.c = parse_double_list(*v, "split.c");

  if (auto v = get("theta.min")) spec.theta.theta_min = parse_number<double>(*v, "theta.min");
  if (auto v = get("theta.max")) spec.theta.theta_max = parse_number<double>(*v, "theta.max");
  if (auto v = get("theta.grid")) spec.theta.grid_points = parse_number<int>(*v, "theta.grid");
  if (auto v = get("theta.tolerance")) spec.theta.tolerance = parse_number<double>(*v, "theta.tolerance");

  if (auto v = get("simulate.samples")) spec.samples = parse_number<std::int64_t>(*v, "simulate.samples");
  if (auto v = get("simulate.seed")) spec.seed = parse_number<std::uint64_t>(*v, "simulate.seed");
  if (auto v = get("simulate.t_max")) spec.t_max = parse_number<int>(*v, "simulate.t_max");
  if (auto v = get("simulate.workers")) spec.workers = parse_number<int>(*v, "simulate.workers");
  if (auto v = get("simulate.initial_estimate")) {
    spec.initial_estimate = parse_number<double>(*v, "simulate.initial_estimate");
    require(spec.initial_estimate >= 0.0, "key 'simulate.initial_estimate' must be >= 0");
  }

  if (auto v = get("output.csv")) spec.csv_path = *v;
  if (auto v = get("output.svg")) spec.svg_path = *v;
  if (auto v = get("output.slot_ms")) spec.slot_ms = parse_number<double>(*v, "output.slot_ms");
  return spec;
}

RunSpec parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

}  // namespace rachbound::cli
