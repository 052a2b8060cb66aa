#pragma once

#include <iosfwd>
#include <vector>

#include "driftsim/dynamics.hpp"

namespace driftsim {

struct HotRegionStats {
    uint64_t roots = 0;
    std::vector<uint64_t> region_counts;
    double hot_share = 0.0;      // roots landing in a max-weight region
    double hot_size = 0.0;       // fraction of objects those regions cover
    double expected_share = 0.0; // max weight / weight sum, time-averaged
    double chi_square = 0.0;     // counts vs weight-implied expectations
    double chi_critical = 0.0;   // upper 1% tail
    bool chi_pass = false;
    bool hot_share_pass = false; // |hot_share - expected_share| <= 0.02
    bool hot_size_pass = false;  // hot_size within 25% of region_fraction
};

// Replays the weight schedule implied by the config over a regional-phase
// root trace and checks the observed shares against it. Rows must be in
// transaction order; non-regional phases are an analysis error.
HotRegionStats analyze_trace(const std::vector<TraceRow>& rows,
                             const RegionalConfig& cfg, uint32_t num_objects);

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out);
std::vector<TraceRow> read_trace_csv(std::istream& in);

// Upper 1% critical value of chi-square with df degrees of freedom
// (Wilson-Hilferty approximation).
double chi_square_critical_99(size_t df);

} // namespace driftsim
