#include "rachbound/run.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

#include "rachbound/snc.hpp"

namespace rachbound::cli {

namespace {

std::string status_of(const BoundResult& r) {
  if (!r.converged) return "not-converged";
  if (r.clamped) return "clamped";
  if (r.trivial) return "trivial";
  return "ok";
}

ScenarioParams scenario(int n, int m) {
  ScenarioParams s;
  s.devices = n;
  s.preambles = m;
  return s;
}

class Collector {
 public:
  explicit Collector(const RunSpec& spec) : spec_(spec) {}

  ResultRow row(std::optional<int> n, int m, std::string policy) const {
    ResultRow r;
    r.engine = engine_name(*spec_.engine);
    r.devices = n;
    r.preambles = m;
    r.policy = std::move(policy);
    return r;
  }

  void add(ResultRow r) {
    if (spec_.slot_ms && r.t) r.t_ms = *r.t * *spec_.slot_ms;
    out_.rows.push_back(std::move(r));
  }

  void add_bound(ResultRow r, const BoundResult& b) {
    r.value = b.value;
    if (!b.trivial) r.theta_star = b.theta_star;
    r.status = status_of(b);
    if (!b.converged) {
      out_.exit_code = kExitNotConverged;
      out_.diagnostics.push_back(describe(r) + ": theta search hit theta_max without converging; "
                                 "raise 'theta.max'");
    }
    for (const auto& note : b.notes) note_once(describe(r, false) + ": " + note);
    add(std::move(r));
  }

  void note_once(const std::string& message) {
    if (std::find(out_.diagnostics.begin(), out_.diagnostics.end(), message) == out_.diagnostics.end()) {
      out_.diagnostics.push_back(message);
    }
  }

  RunOutcome take() { return std::move(out_); }

 private:
  static std::string describe(const ResultRow& r, bool with_t = true) {
    std::ostringstream s;
    s << r.engine << " N=" << (r.devices ? std::to_string(*r.devices) : "-")
      << " M=" << (r.preambles ? std::to_string(*r.preambles) : "-");
    if (r.b_eps) s << " b_eps=" << *r.b_eps;
    if (r.c) s << " c=" << format_double(*r.c);
    if (with_t && r.t) s << " t=" << *r.t;
    return s.str();
  }

  const RunSpec& spec_;
  RunOutcome out_;
};

// Smallest b with P[B > b] <= eps.
int exact_quantile(const Pmf& backlog, double eps) {
  for (auto b = backlog.min_support(); b <= backlog.max_support(); ++b) {
    if (backlog.tail_above(b) <= eps) return static_cast<int>(b);
  }
  return static_cast<int>(backlog.max_support());
}

void run_static(const RunSpec& spec, Collector& out) {
  const double p = spec.policy.static_probability();
  for (int n : spec.devices) {
    for (int m : spec.preambles) {
      const StaticBoundModel model(scenario(n, m), p, spec.max_slots());
      for (const auto& target : spec.targets) {
        const int b = target.resolve(m);
        for (int t : spec.slots) {
          ResultRow r = out.row(n, m, spec.policy.describe());
          r.b_eps = b;
          r.t = t;
          out.add_bound(std::move(r), model.violation(t, b, spec.theta));
        }
      }
      for (double eps : spec.eps) {
        for (int t : spec.slots) {
          ResultRow r = out.row(n, m, spec.policy.describe());
          r.eps = eps;
          r.t = t;
          out.add_bound(std::move(r), model.backlog(t, eps, spec.theta));
        }
      }
    }
  }
}

void run_partial(const RunSpec& spec, Collector& out) {
  for (int n : spec.devices) {
    for (int m : spec.preambles) {
      const PartialBoundModel model(n, m);
      for (const auto& target : spec.targets) {
        const int b = target.resolve(m);
        for (int t : spec.slots) {
          ResultRow r = out.row(n, m, "dynamic");
          r.b_eps = b;
          r.t = t;
          out.add_bound(std::move(r), model.violation(b, t, spec.theta));
        }
      }
    }
  }
}

void run_full(const RunSpec& spec, Collector& out) {
  for (int n : spec.devices) {
    for (int m : spec.preambles) {
      for (double c : spec.c) {
        const FullBoundModel model(n, m, {c}, spec.max_slots(), spec.theta);
        for (int t : spec.slots) {
          ResultRow r = out.row(n, m, "dynamic");
          r.c = c;
          r.b_eps = 0;
          r.t = t;
          out.add_bound(std::move(r), model.violation(t));
        }
      }
    }
  }
}

void run_oracle(const RunSpec& spec, Collector& out) {
  const int horizon = spec.max_slots();
  for (int n : spec.devices) {
    for (int m : spec.preambles) {
      const auto trajectory = backlog_trajectory(scenario(n, m), spec.policy, horizon);
      for (const auto& target : spec.targets) {
        const int b = target.resolve(m);
        for (int t = 0; t <= horizon; ++t) {
          ResultRow r = out.row(n, m, spec.policy.describe());
          r.b_eps = b;
          r.t = t;
          r.value = trajectory[static_cast<std::size_t>(t)].pmf.tail_above(b);
          out.add(std::move(r));
        }
      }
      for (double eps : spec.eps) {
        for (int t : spec.slots) {
          ResultRow r = out.row(n, m, spec.policy.describe());
          r.eps = eps;
          r.t = t;
          r.value = exact_quantile(trajectory[static_cast<std::size_t>(t)].pmf, eps);
          out.add(std::move(r));
        }
      }
    }
  }
}

void run_simulate(const RunSpec& spec, Collector& out) {
  for (int n : spec.devices) {
    for (int m : spec.preambles) {
      SimConfig cfg;
      cfg.scenario = scenario(n, m);
      cfg.policy = spec.policy;
      cfg.knowledge = spec.knowledge;
      cfg.samples = spec.samples;
      cfg.base_seed = spec.seed;
      cfg.max_slots = std::max({1, spec.t_max, spec.max_slots()});
      cfg.workers = spec.workers;
      cfg.initial_estimate = spec.initial_estimate;
      std::vector<int> targets;
      for (const auto& target : spec.targets) targets.push_back(target.resolve(m));
      const auto histograms = resolution_histograms(cfg, targets);
      for (std::size_t j = 0; j < targets.size(); ++j) {
        for (const auto& pt : ccdf_from_histogram(histograms[j], spec.slots)) {
          ResultRow r = out.row(n, m, cfg.policy_label());
          r.b_eps = targets[j];
          r.t = pt.slots;
          r.value = pt.eps;
          r.ci_low = pt.ci.low;
          r.ci_high = pt.ci.high;
          r.samples = spec.samples;
          r.seed = spec.seed;
          out.add(std::move(r));
        }
      }
    }
  }
  out.note_once(std::string("rng: ") + kRngAlgorithm);
}

void run_dimension(const RunSpec& spec, Collector& out) {
  std::vector<BacklogTarget> targets = spec.targets;
  if (targets.empty()) targets.push_back({});
  for (int m : spec.preambles) {
    for (const auto& target : targets) {
      const int b = target.resolve(m);
      for (double c : spec.c) {
        for (int t : spec.slots) {
          for (double eps : spec.eps) {
            const auto d = max_supported_devices(m, {b, t, eps}, {c}, spec.theta);
            ResultRow r = out.row(std::nullopt, m, "dynamic");
            if (b == 0) r.c = c;
            r.b_eps = b;
            r.t = t;
            r.eps = eps;
            r.value = d.max_devices;
            if (!d.monotone) {
              r.status = "non-monotone";
              out.note_once("dimension M=" + std::to_string(m) + " t=" + std::to_string(t) +
                            ": bound not monotone in N at the bracketing probes");
            }
            out.add(std::move(r));
          }
        }
      }
    }
  }
}

}  // namespace

RunOutcome run(const RunSpec& spec) {
  spec.validate();
  Collector out(spec);
  switch (*spec.engine) {
    case Engine::bound_static: run_static(spec, out); break;
    case Engine::bound_partial: run_partial(spec, out); break;
    case Engine::bound_full: run_full(spec, out); break;
    case Engine::oracle: run_oracle(spec, out); break;
    case Engine::simulate: run_simulate(spec, out); break;
    case Engine::dimension: run_dimension(spec, out); break;
  }
  return out.take();
}

Chart make_chart(const std::vector<ResultRow>& rows) {
  Chart chart;
  if (rows.empty()) return chart;
  const bool dimensioning = rows.front().engine == "dimension";
  const bool backlog_rows = !dimensioning && rows.front().eps && !rows.front().b_eps;

  auto opt = [](const auto& v) { return v ? format_double(static_cast<double>(*v)) : std::string("-"); };
  std::map<std::string, Series> groups;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!r.value) continue;
    std::ostringstream key;
    double x = 0.0;
    if (dimensioning) {
      key << "M=" << opt(r.preambles) << " t=" << opt(r.t);
      if (r.b_eps && *r.b_eps > 0) key << " b=" << *r.b_eps;
      if (r.c) key << " c=" << format_double(*r.c);
      x = r.eps.value_or(0.0);
    } else if (backlog_rows) {
      key << r.engine << " N=" << opt(r.devices) << " M=" << opt(r.preambles) << " t=" << opt(r.t);
      x = r.eps.value_or(0.0);
    } else {
      key << r.engine << " N=" << opt(r.devices) << " M=" << opt(r.preambles) << " " << r.policy
          << " b=" << opt(r.b_eps);
      if (r.c) key << " c=" << format_double(*r.c);
      x = r.t.value_or(0);
    }
    auto [it, fresh] = groups.try_emplace(key.str());
    if (fresh) {
      it->second.label = key.str();
      it->second.dashed = r.engine == "simulate";
      order.push_back(key.str());
    }
    it->second.points.emplace_back(x, *r.value);
  }
  for (const auto& k : order) {
    auto& s = groups[k];
    std::sort(s.points.begin(), s.points.end());
    chart.series.push_back(std::move(s));
  }
  if (dimensioning) {
    chart.title = "Maximum supported devices";
    chart.x_label = "violation probability eps";
    chart.y_label = "N_max";
    chart.log_x = true;
  } else if (backlog_rows) {
    chart.title = "Backlog bound";
    chart.x_label = "violation probability eps";
    chart.y_label = "backlog b";
    chart.log_x = true;
  } else {
    chart.title = "Violation probability";
    chart.x_label = "t [PRACH slots]";
    chart.y_label = "P[B(t) > b]";
    chart.log_y = true;
  }
  return chart;
}

}  // namespace rachbound::cli
