#pragma once

namespace rmcf {

/// Execution policy for the per-node kernels. `serial` is the reference path
/// kept for testing; `parallel` distributes nodes over OpenMP threads. Both
/// produce bit-identical results because every node is computed independently.
enum class Exec { serial, parallel };

}  // namespace rmcf
