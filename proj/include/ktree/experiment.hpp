#pragma once

#include <span>
#include <string>

#include "ktree/config.hpp"
#include "ktree/report.hpp"

namespace ktree {

/// geometry, maxfn, zconst, certify, lemma, chain, scan, twoweight.
std::span<const char* const> subcommands();

/// Validates the configuration and runs one subcommand. The report is a pure
/// function of (subcommand, config) unless output.timings is set. Failed
/// assertions are recorded as checks; errors are thrown as ktree::Error.
Report run_experiment(const std::string& subcommand, const ExperimentConfig& config);

/// Test function selected by function.kind, seeded with `seed` when random.
TreeFunction make_test_function(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace ktree
