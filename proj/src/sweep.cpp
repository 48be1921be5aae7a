#include "rmcf/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <ostream>

#include "rmcf/csv.hpp"
#include "rmcf/error.hpp"
#include "rmcf/scenario.hpp"

namespace rmcf {

int SweepResult::aborted() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return c.status == "aborted"; }));
}

namespace {

std::vector<std::vector<double>> cartesian(const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<double>> out{{}};
  for (const auto& a : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out)
      for (double v : a.values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

SweepCell run_cell(const FlowConfig& base, const std::vector<SweepAxis>& axes, int index,
                   const std::vector<double>& values, const std::string& out_dir) {
  SweepCell cell;
  cell.index = index;
  cell.values = values;
  cell.extinction_time = std::numeric_limits<double>::quiet_NaN();
  try {
    FlowConfig c = base;
    c.axes.clear();
    for (std::size_t k = 0; k < axes.size(); ++k) set_numeric(c, axes[k].key, values[k]);
    RunOptions opt;
    opt.exec = Exec::serial;
    if (!out_dir.empty()) opt.out_dir = (std::filesystem::path(out_dir) / ("cell_" + std::to_string(index))).string();
    const ScenarioResult r = run_scenario(c, opt);
    cell.status = r.aborted ? "aborted" : "completed";
    cell.reason = r.abort_reason;
    cell.outcome = r.outcome;
    if (!r.series.monitors.empty()) {
      cell.final_t = r.series.monitors.back().t;
      cell.final_Hmax = r.series.monitors.back().Hmax;
      cell.final_maxA2 = r.series.monitors.back().maxA2;
    }
    cell.extinction_time = r.extinction_time;
    cell.checks_failed = static_cast<int>(std::count_if(r.checks.begin(), r.checks.end(), [](const VerifyRow& v) { return !v.pass; }));
  } catch (const std::exception& e) {
    cell.status = "aborted";
    cell.reason = e.what();
  }
  return cell;
}

}  // namespace

SweepResult run_sweep(const FlowConfig& base, const std::string& out_dir, Exec exec) {
  SweepResult result;
  result.axes = base.axes;
  const auto combos = cartesian(base.axes);
  if (combos.size() > static_cast<std::size_t>(kMaxSweepCells)) throw InvalidArgument("sweep exceeds 10000 cells");
  result.cells.resize(combos.size());
  const long count = static_cast<long>(combos.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (long i = 0; i < count; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    result.cells[iu] = run_cell(base, base.axes, static_cast<int>(i), combos[iu], out_dir);
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "cell";
  for (const auto& a : result.axes) out << ',' << a.key;
  out << ",outcome,status,final_t,final_Hmax,final_maxA2,extinction_time,checks_failed\n";
  for (const auto& c : result.cells) {
    out << c.index;
    for (double v : c.values) out << ',' << format_number(v);
    out << ',' << to_string(c.outcome) << ',' << c.status << ',' << format_number(c.final_t) << ','
        << format_number(c.final_Hmax) << ',' << format_number(c.final_maxA2) << ',' << format_number(c.extinction_time)
        << ',' << c.checks_failed << '\n';
  }
}

bool monotone_boundary(const SweepResult& result, const std::string& key) {
  std::size_t axis = result.axes.size();
  for (std::size_t k = 0; k < result.axes.size(); ++k)
    if (result.axes[k].key == key) axis = k;
  if (axis == result.axes.size()) throw InvalidArgument("no sweep axis '" + key + "'");

  // Group cells into lines along `key`, keyed by the other coordinates.
  std::map<std::vector<double>, std::vector<const SweepCell*>> lines;
  for (const auto& c : result.cells) {
    if (c.status != "completed") return false;
    auto other = c.values;
    other.erase(other.begin() + static_cast<long>(axis));
    lines[other].push_back(&c);
  }
  int direction = 0;
  std::size_t previous = 0;
  bool first = true;
  for (auto& [other, line] : lines) {
    std::sort(line.begin(), line.end(),
              [axis](const SweepCell* a, const SweepCell* b) { return a->values[axis] < b->values[axis]; });
    std::size_t last_shrink = 0;
    std::size_t first_tg = line.size();
    bool any_shrink = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i]->outcome == Outcome::ShrinkToRoundPoint) {
        last_shrink = i;
        any_shrink = true;
      }
      if (line[i]->outcome == Outcome::TotallyGeodesicLimit && first_tg == line.size()) first_tg = i;
    }
    if (any_shrink && first_tg < line.size() && last_shrink > first_tg) return false;
    if (!first) {
      const int d = first_tg > previous ? 1 : (first_tg < previous ? -1 : 0);
      if (d != 0) {
        if (direction != 0 && d != direction) return false;
        direction = d;
      }
    }
    previous = first_tg;
    first = false;
  }
  return true;
}

}  // namespace rmcf
