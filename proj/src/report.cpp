#include "driftsim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "driftsim/config_io.hpp"
#include "driftsim/errors.hpp"

namespace driftsim {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_rate(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<SweepRow> sorted_rows(std::vector<SweepRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        auto key = [](const SweepRow& r) {
            return std::tuple(static_cast<int>(r.protocol),
                              static_cast<int>(r.dependency), r.integrated,
                              static_cast<int>(r.policy), r.h, r.seed);
        };
        return key(a) < key(b);
    });
    return rows;
}

} // namespace

std::string results_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream o;
    o << "protocol,dependency,policy,h,seed,txns,transaction_io,clustering_io,"
         "total_io,hit_rate\n";
    for (const SweepRow& r : sorted_rows(rows)) {
        o << to_string(r.protocol) << ','
          << (r.integrated ? to_string(r.dependency) : "none") << ','
          << to_string(r.policy) << ',' << fmt_double(r.h) << ',' << r.seed << ','
          << r.transactions << ',' << r.metrics.transaction_io << ','
          << r.metrics.clustering_io << ',' << r.metrics.total_io << ','
          << fmt_rate(r.metrics.hit_rate) << '\n';
    }
    return o.str();
}

void emit_results(const std::vector<SweepRow>& rows,
                  const std::filesystem::path& out_dir) {
    if (rows.empty())
        throw RunError("emit_results: empty result table, nothing to write");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw RunError("emit_results: cannot create " + out_dir.string());

    auto write_file = [&](const std::filesystem::path& path, const std::string& body) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw RunError("emit_results: cannot write " + path.string());
        f << body;
    };

    write_file(out_dir / "results.csv", results_csv(rows));

    // One plot file per protocol: rows keyed by h, one total-I/O column per
    // policy, averaged over seeds when several share a cell.
    std::vector<SweepRow> rows_sorted = sorted_rows(rows);
    std::set<RegionalProtocol> protocols;
    for (const SweepRow& r : rows_sorted) protocols.insert(r.protocol);

    for (RegionalProtocol proto : protocols) {
        std::set<PolicyKind> policies;
        std::set<double> hs;
        std::map<std::pair<double, PolicyKind>, std::pair<double, int>> cells;
        for (const SweepRow& r : rows_sorted) {
            if (r.protocol != proto) continue;
            policies.insert(r.policy);
            hs.insert(r.h);
            auto& cell = cells[{r.h, r.policy}];
            cell.first += static_cast<double>(r.metrics.total_io);
            cell.second += 1;
        }

        std::ostringstream o;
        o << "# h";
        for (PolicyKind p : policies) o << ' ' << to_string(p);
        o << '\n';
        for (double h : hs) {
            o << fmt_double(h);
            for (PolicyKind p : policies) {
                auto it = cells.find({h, p});
                if (it == cells.end()) o << " nan";
                else o << ' ' << fmt_double(it->second.first / it->second.second);
            }
            o << '\n';
        }
        write_file(out_dir / (std::string("plot_") + to_string(proto) + ".dat"),
                   o.str());
    }
}

} // namespace driftsim
