#include "driftsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "driftsim/errors.hpp"

namespace driftsim {

double chi_square_critical_99(size_t df) {
    if (df == 0) return 0.0;
    constexpr double z99 = 2.3263478740408408;
    double d = static_cast<double>(df);
    double t = 1.0 - 2.0 / (9.0 * d) + z99 * std::sqrt(2.0 / (9.0 * d));
    return d * t * t * t;
}

HotRegionStats analyze_trace(const std::vector<TraceRow>& rows,
                             const RegionalConfig& cfg, uint32_t num_objects) {
    if (rows.empty()) throw RunError("analyze_trace: empty trace");
    cfg.validate();

    auto sizes = region_sizes(cfg, num_objects, /*allow_collapse=*/false);
    WeightSchedule sched = make_weight_schedule(cfg, sizes);
    const size_t n = sizes.size();

    HotRegionStats st;
    st.roots = rows.size();
    st.region_counts.assign(n, 0);
    std::vector<double> expected(n, 0.0);
    double hot_share_sum = 0.0;
    double hot_size_sum = 0.0;
    uint64_t hot_hits = 0;

    for (const TraceRow& row : rows) {
        if (row.phase != RootPhase::Regional)
            throw RunError("analyze_trace: trace contains non-regional selections");
        if (row.region >= n)
            throw RunError("analyze_trace: region annotation out of range");
        st.region_counts[row.region] += 1;

        double total = 0.0, top = 0.0;
        for (size_t r = 0; r < n; ++r) {
            if (sizes[r] == 0) continue;
            total += sched.weights[r];
            top = std::max(top, sched.weights[r]);
        }
        if (total <= 0.0) throw RunError("analyze_trace: schedule has zero weight");

        double top_weight = 0.0;
        size_t top_objects = 0;
        for (size_t r = 0; r < n; ++r) {
            if (sizes[r] == 0) continue;
            expected[r] += sched.weights[r] / total;
            if (sched.weights[r] == top) {
                top_weight += sched.weights[r];
                top_objects += sizes[r];
            }
        }
        if (sizes[row.region] > 0 && sched.weights[row.region] == top) ++hot_hits;
        hot_share_sum += top_weight / total;
        hot_size_sum += static_cast<double>(top_objects) / num_objects;

        advance_pattern(sched, cfg);
    }

    st.hot_share = static_cast<double>(hot_hits) / st.roots;
    st.hot_size = hot_size_sum / st.roots;
    st.expected_share = hot_share_sum / st.roots;

    size_t df = 0;
    for (size_t r = 0; r < n; ++r) {
        if (expected[r] <= 0.0) continue;
        double diff = static_cast<double>(st.region_counts[r]) - expected[r];
        st.chi_square += diff * diff / expected[r];
        ++df;
    }
    df = df > 0 ? df - 1 : 0;
    st.chi_critical = chi_square_critical_99(df);
    st.chi_pass = st.chi_square < st.chi_critical;
    st.hot_share_pass = std::abs(st.hot_share - st.expected_share) <= 0.02;
    st.hot_size_pass =
        std::abs(st.hot_size - cfg.region_fraction) <= 0.25 * cfg.region_fraction;
    return st;
}

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out) {
    out << "txn_id,root_id,phase,region_of_root\n";
    for (const TraceRow& r : rows)
        out << r.txn << ',' << r.root << ',' << to_string(r.phase) << ','
            << r.region << '\n';
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::vector<TraceRow> rows;
    std::string line;
    if (!std::getline(in, line) || line != "txn_id,root_id,phase,region_of_root")
        throw RunError("trace csv: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream s(line);
        std::string txn, root, phase, region;
        if (!std::getline(s, txn, ',') || !std::getline(s, root, ',') ||
            !std::getline(s, phase, ',') || !std::getline(s, region, ','))
            throw RunError("trace csv: malformed row: " + line);
        TraceRow row{};
        try {
            row.txn = std::stoull(txn);
            row.root = static_cast<uint32_t>(std::stoul(root));
            row.region = static_cast<uint32_t>(std::stoul(region));
        } catch (...) {
            throw RunError("trace csv: malformed row: " + line);
        }
        if (phase == "regional") row.phase = RootPhase::Regional;
        else if (phase == "rand") row.phase = RootPhase::Randomisation;
        else if (phase == "dep") row.phase = RootPhase::Dependency;
        else if (phase == "dep_fb") row.phase = RootPhase::DependencyFallback;
        else throw RunError("trace csv: unknown phase: " + phase);
        rows.push_back(row);
    }
    return rows;
}

} // namespace driftsim
