#pragma once

#include <filesystem>
#include <vector>

#include "driftsim/experiment.hpp"

namespace driftsim {

// Writes results.csv plus one plot-data file per protocol (h column followed
// by one total-I/O column per policy). Byte-identical for identical inputs.
void emit_results(const std::vector<SweepRow>& rows,
                  const std::filesystem::path& out_dir);

std::string results_csv(const std::vector<SweepRow>& rows);

} // namespace driftsim
