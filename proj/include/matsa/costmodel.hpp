#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "matsa/ledger.hpp"

namespace matsa {

/// Per-bit cell timing and energy. The exploration ranges are
/// latencies {1,3,5,10,20} ns, read energies {20,50,100} pJ and write
/// energies {30,70,400} pJ.
struct TechParams {
    double rd_lat_ns = 5.0;
    double wr_lat_ns = 10.0;
    double rd_energy_pj = 50.0;
    double wr_energy_pj = 70.0;
    std::string name = "baseline";

    /// Named presets: "baseline" is the working point used throughout the
    /// characterisation plots (5/10 ns, 50/70 pJ); "fast" and "slow" are the
    /// optimistic and conservative corners of the exploration table;
    /// "uniform5" is the 5 ns symmetric cell the endurance estimate assumes.
    static TechParams preset(const std::string& name) {
        if (name == "baseline") return {5, 10, 50, 70, "baseline"};
        if (name == "fast") return {1, 1, 20, 30, "fast"};
        if (name == "slow") return {20, 20, 100, 400, "slow"};
        if (name == "uniform5") return {5, 5, 50, 70, "uniform5"};
        throw std::invalid_argument("unknown tech preset: " + name);
    }

    static const std::vector<double>& latency_grid() {
        static const std::vector<double> g{1, 3, 5, 10, 20};
        return g;
    }
    static const std::vector<double>& read_energy_grid() {
        static const std::vector<double> g{20, 50, 100};
        return g;
    }
    static const std::vector<double>& write_energy_grid() {
        static const std::vector<double> g{30, 70, 400};
        return g;
    }
};

/// Number of compute-enabled crossbars; columns = 256 per crossbar.
struct DeviceConfig {
    std::size_t num_crossbars = 1024;
    std::string name = "portable";

    std::size_t columns() const { return num_crossbars * 256; }
    std::uint64_t cells() const { return static_cast<std::uint64_t>(columns()) * 256ull; }

    static DeviceConfig preset(const std::string& name) {
        if (name == "embedded") return {128, "embedded"};
        if (name == "portable") return {1024, "portable"};
        if (name == "hpc") return {4096, "hpc"};
        throw std::invalid_argument("unknown device preset: " + name);
    }
};

/// Execution time: critical-path activation phases weighted by the per-bit
/// latencies. Columns fire in parallel, so phases (not bit totals) carry the
/// time.
inline double total_time_ns(const CostLedger& l, const TechParams& t) {
    return static_cast<double>(l.read_phases) * t.rd_lat_ns +
           static_cast<double>(l.write_phases) * t.wr_lat_ns;
}

/// Energy: every sensed or written bit in every column switches, so bit
/// totals carry the energy.
inline double total_energy_pj(const CostLedger& l, const TechParams& t) {
    return static_cast<double>(l.read_bits) * t.rd_energy_pj +
           static_cast<double>(l.write_bits) * t.wr_energy_pj;
}

/// Extrapolates the representative batch's mean per-cell write count to
/// continuous operation over `wall_seconds`, under the given tech point.
/// Returns mean writes per cell of the batch's cell population.
inline double endurance_writes_per_cell(const CostLedger& l, const TechParams& t,
                                        double wall_seconds) {
    if (wall_seconds == 0.0) return 0.0;
    const double batch_ns = total_time_ns(l, t);
    if (batch_ns <= 0.0) throw std::invalid_argument("endurance: batch has zero modeled time");
    return l.mean_writes_per_cell() * (wall_seconds * 1e9 / batch_ns);
}

struct SensitivityRow {
    double rd_lat, wr_lat, rd_energy, wr_energy;
    double time_ns, energy_pj;
};

/// Latency/energy sensitivity derived from one workload ledger. Time and
/// energy are exactly linear in the ledger counts, so every grid point is a
/// reweighting of the same two numbers per axis.
struct SensitivityReport {
    TechParams base;
    std::vector<SensitivityRow> rows;
    double base_time_ns = 0, base_energy_pj = 0;
    double slowdown_rd10 = 0;  // time(10x rd_lat) / time(base)
    double slowdown_wr10 = 0;  // time(10x wr_lat) / time(base)
    double read_energy_share = 0, write_energy_share = 0;
};

inline SensitivityReport sensitivity_report(const CostLedger& l, const TechParams& base) {
    SensitivityReport r;
    r.base = base;
    r.base_time_ns = total_time_ns(l, base);
    r.base_energy_pj = total_energy_pj(l, base);

    TechParams rd10 = base, wr10 = base;
    rd10.rd_lat_ns *= 10.0;
    wr10.wr_lat_ns *= 10.0;
    r.slowdown_rd10 = total_time_ns(l, rd10) / r.base_time_ns;
    r.slowdown_wr10 = total_time_ns(l, wr10) / r.base_time_ns;

    const double re = static_cast<double>(l.read_bits) * base.rd_energy_pj;
    const double we = static_cast<double>(l.write_bits) * base.wr_energy_pj;
    r.read_energy_share = re / (re + we);
    r.write_energy_share = we / (re + we);

    for (double rl : TechParams::latency_grid())
        for (double wl : TechParams::latency_grid()) {
            TechParams t = base;
            t.rd_lat_ns = rl;
            t.wr_lat_ns = wl;
            r.rows.push_back({rl, wl, base.rd_energy_pj, base.wr_energy_pj, total_time_ns(l, t),
                              total_energy_pj(l, t)});
        }
    for (double re2 : TechParams::read_energy_grid())
        for (double we2 : TechParams::write_energy_grid()) {
            TechParams t = base;
            t.rd_energy_pj = re2;
            t.wr_energy_pj = we2;
            r.rows.push_back({base.rd_lat_ns, base.wr_lat_ns, re2, we2, total_time_ns(l, t),
                              total_energy_pj(l, t)});
        }
    return r;
}

}  // namespace matsa
