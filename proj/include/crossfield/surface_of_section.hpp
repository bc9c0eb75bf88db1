#pragma once

#include "crossfield/secular_dynamics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace crossfield {

/// Starting point on the section phi2 = 0.
struct SectionSeed {
    double j1z = 0.0;
    double phi1 = 0.0;
};

struct SectionPoint {
    double phi1 = 0.0;   ///< in [-pi, pi)
    double j1z = 0.0;
    double t = 0.0;
    int branch = 0;      ///< index of the J2z root that seeded the trajectory (ascending J2z)
    SecularState state;
};

struct SectionTrajectory {
    int branch = 0;
    double j2z0 = 0.0;
    std::vector<SectionPoint> points;  ///< the seed itself first, then every upward crossing
    double j1z_spread = 0.0;           ///< max - min of J1z over points
    double max_energy_error = 0.0;     ///< max |H - target| over points
    double max_norm_drift = 0.0;
};

struct SeedResult {
    std::size_t seed_id = 0;
    SectionSeed seed;
    std::vector<SectionTrajectory> branches;
    std::string skipped;     ///< nonempty when no admissible J2z root exists
    std::string diagnostic;  ///< nonempty when a branch failed numerically
};

struct PsosOptions {
    double t_end = 2000.0;
    IntegratorOptions integrator{1e-11, 1e-11, 1e-3, 1e-12, 1.0, false};
    double crossing_tol = 1e-10;  ///< |phi2| at a refined crossing
    int root_grid = 2048;         ///< polar-angle scan resolution for J2z roots
    unsigned threads = 0;
};

struct PsosResult {
    ScaledParams params;
    PsosOptions options;
    std::vector<SeedResult> seeds;  ///< in seed order
};

/// Uniform cell-centred grid: J1z over (-1/2, 1/2), phi1 over (-pi, pi).
std::vector<SectionSeed> seed_grid(std::size_t n_j1z, std::size_t n_phi1);

/// All J2z in [-1/2, 1/2] with H(J1z, phi1, J2z, phi2 = 0) = 2 se, ascending.
/// H is not a polynomial in J2z once the perpendicular component of I2 is
/// eliminated, so the roots are bracketed on the polar angle of I2 about
/// omega2 and refined by TOMS 748.
std::vector<double> section_roots(const ScaledParams& p, const SecularFrames& frames, const SectionSeed& seed,
                                  int grid = 2048);

/// Runs every seed and every root branch to options.t_end, recording upward
/// crossings of phi2 = 0. Throws DegenerateFrame when an omega vector vanishes.
PsosResult psos(const ScaledParams& p, const std::vector<SectionSeed>& seeds, const PsosOptions& options = {});

struct PsosSummary {
    std::size_t seeds = 0;
    std::size_t skipped = 0;
    std::size_t trajectories = 0;
    std::size_t chaotic_trajectories = 0;
    std::size_t chaotic_seeds = 0;       ///< seeds with at least one branch above the threshold
    double chaotic_fraction = 0.0;       ///< chaotic_seeds / seeds
    double max_spread = 0.0;
    double max_energy_error = 0.0;
    int cells = 50;
    std::vector<int> occupancy;          ///< cells x cells counts, row = J1z bin, column = phi1 bin
    std::size_t occupied_cells = 0;
    std::size_t chaotic_occupied_cells = 0;  ///< cells hit by trajectories above the threshold
};

PsosSummary summarize(const PsosResult& result, double chaos_threshold = 0.3, int cells = 50);

} // namespace crossfield
