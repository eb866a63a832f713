#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "optmol/observables.hpp"
#include "optmol/params.hpp"

namespace optmol {

/// Output column selection for sweeps; deselected columns are emitted as nan.
enum OutputFlag : std::uint32_t {
    kOutCoherence = 1u << 0,
    kOutQfi = 1u << 1,
    kOutCurl = 1u << 2,
    kOutCurrents = 1u << 3,  ///< j_a, j_b and their population/coherence split
    kOutEpr = 1u << 4,
    kOutAll = (1u << 5) - 1,
};

/// Parses a comma-separated list like "coherence,qfi,j_curl,j_a,epr" into a
/// flag mask.  Throws std::invalid_argument on unknown names.
std::uint32_t parse_outputs(const std::string& spec);

struct SweepAxis {
    std::string name;            ///< "delta_t" or "lambda"
    std::vector<double> values;

    static SweepAxis linspace(std::string name, double min, double max, int count);
    static SweepAxis explicit_values(std::string name, std::vector<double> values);
};

struct SweepConfig {
    SystemParams base;
    SweepAxis axis1;                   ///< outer (slow) CSV index
    std::optional<SweepAxis> axis2;    ///< inner index, optional
    double qfi_step = 1e-6;
    std::uint32_t outputs = kOutAll;
    int threads = 1;

    void validate() const;  ///< checks counts, axis names and grid-wide parameter bounds
};

struct SweepRow {
    double delta_t = 0;
    double lambda = 0;
    ObservablesRecord record;
    std::uint32_t failed = 0;         ///< OutputFlag bits whose computation failed
    std::string error;                ///< first failure message, empty if clean
};

/// Evaluates the grid (worker pool, deterministic row order).
std::vector<SweepRow> run_sweep(const SweepConfig& config);

/// Fixed header; 17-significant-digit fields; "nan" for deselected or failed
/// cells; LF line endings.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     std::uint32_t outputs);

/// Bundled grids reproducing the reference figures: "fig2a", "fig2b", "fig3"
/// (three coupling lines over a temperature-difference ramp) and "fig4"
/// (50x50 contour grid).  Throws std::invalid_argument on unknown names.
SweepConfig preset_sweep(const std::string& name);

}  // namespace optmol
