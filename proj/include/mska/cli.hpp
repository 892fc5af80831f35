#pragma once

#include "mska/config.hpp"

namespace mska {

/// Writes subsample indices, coordinates and stats plus the effective config
/// into cfg.output_dir.
void cmd_subsample(const RunConfig& cfg);

/// Runs the full pipeline (subsample, dictionary, assembly, continuation
/// TR-SSN) and writes coefficients, sparsity and iteration metrics.
void cmd_solve(const RunConfig& cfg);

/// Reads coefficients.csv back, evaluates the expansion on the evaluation set
/// and a reconstruction grid, and writes the error report.
void cmd_evaluate(const RunConfig& cfg);

}  // namespace mska
