#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rmcf/config.hpp"
#include "rmcf/coupled_flow.hpp"
#include "rmcf/exec.hpp"

namespace rmcf {

struct SweepCell {
  int index = 0;
  std::vector<double> values;  // one per axis, in axis order
  std::string status;          // "completed" or "aborted"
  std::string reason;          // set for aborted cells
  Outcome outcome = Outcome::Undetermined;
  double final_t = 0.0;
  double final_Hmax = 0.0;
  double final_maxA2 = 0.0;
  double extinction_time = 0.0;  // NaN unless the run blew up
  int checks_failed = 0;
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<SweepCell> cells;
  int aborted() const;
};

/// Cartesian product of config.axes (the first axis varies slowest); with no
/// axes a single cell runs the base config. Cells run concurrently with serial
/// kernels inside; a cell whose parameters are invalid or whose run throws is
/// recorded as aborted. With out_dir set each cell writes its files under
/// <out_dir>/cell_<index>/.
SweepResult run_sweep(const FlowConfig& base, const std::string& out_dir = {}, Exec exec = Exec::parallel);

/// `cell,<axis keys...>,outcome,status,final_t,final_Hmax,final_maxA2,extinction_time,checks_failed`.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// True when, for every setting of the other axes, the cells ordered along
/// `key` classify as ShrinkToRoundPoint first and TotallyGeodesicLimit after
/// (Undetermined cells only in between), and the first TotallyGeodesicLimit
/// index moves monotonically across those lines. Cells that are aborted make
/// the boundary ill-defined and return false.
bool monotone_boundary(const SweepResult& result, const std::string& key);

}  // namespace rmcf
