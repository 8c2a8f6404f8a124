#pragma once

#include "spencer/pipeline.hpp"
#include "spencer/run_config.hpp"

#include <iosfwd>

namespace spencer {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitPipeline = 3,
};

PipelineConfig make_pipeline_config(const RunConfig& config, std::shared_ptr<const PairField> field);

/// Entry point of the `spencer` tool; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spencer
