#pragma once

namespace slnd {

/// Experiment loops run either as a plain serial reference loop or as an
/// OpenMP parallel loop. Both produce identical output: per-sample state is
/// derived from (seed, index) and results are merged in index order.
enum class ExecMode { serial, parallel };

}  // namespace slnd
