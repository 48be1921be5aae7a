#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rmcf/coupled_flow.hpp"

namespace rmcf {

inline constexpr int kCheckpointVersion = 1;
/// Monitor samples kept in a checkpoint.
inline constexpr std::size_t kCheckpointTail = 64;

struct Checkpoint {
  FlowState state;
  std::vector<CoupledMonitor> tail;  // most recent samples, oldest first
};

/// Self-describing text:
///   rmcf-checkpoint <version>
///   t <t> / step <step> / resamples <count>
///   metric <n> <M>      then M+1 lines `b phi`
///   curve <P> <topology> <orientation>   then P+1 lines `x alpha`
///   monitors <count>    then one comma-separated line per sample
///   end
/// Doubles are written in shortest round-trip form, so load(save(s)) == s
/// bit for bit and save is byte-identical after a round trip.
void save_checkpoint(std::ostream& out, const Checkpoint& cp);
/// Throws FormatError on a foreign header, a version mismatch (never
/// migrated) or truncated / malformed content.
Checkpoint load_checkpoint(std::istream& in);

void save_checkpoint_file(const std::string& path, const Checkpoint& cp);
Checkpoint load_checkpoint_file(const std::string& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string exact_number(double v);

}  // namespace rmcf
