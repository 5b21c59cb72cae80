#include "rachbound/compare.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "rachbound/config.hpp"
#include "rachbound/run.hpp"

namespace rachbound::cli {

namespace {

using Key = std::tuple<int, int, int, int>;  // N, M, b_eps, t

bool is_bound(const ResultRow& r) { return r.engine.rfind("bound-", 0) == 0; }

std::optional<Key> key_of(const ResultRow& r) {
  if (!r.devices || !r.preambles || !r.b_eps || !r.t || !r.value) return std::nullopt;
  return Key{*r.devices, *r.preambles, *r.b_eps, *r.t};
}

}  // namespace

CompareReport compare_tables(const std::vector<ResultRow>& bound,
                             const std::vector<ResultRow>& reference) {
  CompareReport report;
  std::multimap<Key, const ResultRow*> bounds;
  for (const auto& r : bound) {
    if (!is_bound(r)) throw InputError("first table must hold bound-* rows (found '" + r.engine + "')");
    if (auto k = key_of(r)) bounds.emplace(*k, &r);
  }
  report.max_margin = -std::numeric_limits<double>::infinity();

  for (const auto& ref : reference) {
    if (ref.engine != "simulate" && ref.engine != "oracle") {
      throw InputError("second table must hold simulate or oracle rows (found '" + ref.engine + "')");
    }
    const auto k = key_of(ref);
    if (!k) continue;
    const bool estimated = ref.policy == "dynamic-est";
    const auto [first, last] = bounds.equal_range(*k);
    for (auto it = first; it != last; ++it) {
      const ResultRow& b = *it->second;
      if (!(b.policy == ref.policy || (estimated && b.policy == "dynamic"))) continue;
      ++report.matched;

      double target = *ref.value - 1e-9;
      if (ref.engine == "simulate") {
        if (!ref.samples || !ref.ci_high) throw InputError("simulation rows need samples and ci_high");
        const auto hits = std::llround(*ref.value * static_cast<double>(*ref.samples));
        if (hits < 10) continue;
        target = *ref.ci_high;
      }
      ++report.checked;
      const double margin = target - *b.value;
      report.max_margin = std::max(report.max_margin, margin);
      if (margin > 0.0) {
        std::ostringstream line;
        line << (estimated ? "INFO " : "FAIL ") << b.engine << " N=" << std::get<0>(*k)
             << " M=" << std::get<1>(*k) << " b_eps=" << std::get<2>(*k) << " t=" << std::get<3>(*k);
        if (b.c) line << " c=" << format_double(*b.c);
        line << ": bound " << format_double(*b.value) << " < " << ref.engine
             << (ref.engine == "simulate" ? " upper CI " : " value ") << format_double(target);
        report.lines.push_back(line.str());
        if (estimated) {
          ++report.informational_failures;
        } else {
          ++report.failures;
        }
      }
    }
  }
  if (report.matched == 0) {
    throw InputError("no (N, M, b_eps, t, policy) key of the reference table matches the bound table");
  }
  if (report.checked == 0) report.max_margin = 0.0;
  report.exit_code = report.failures > 0 ? kExitDominanceFailure : kExitOk;
  return report;
}

}  // namespace rachbound::cli
