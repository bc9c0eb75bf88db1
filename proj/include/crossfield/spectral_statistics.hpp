#pragma once

#include "crossfield/units.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crossfield {

struct LevelSequence {
    int n = 0;
    std::vector<double> energies;  ///< au, strictly ascending
    FieldParams params;
};

/// Sorts and merges levels closer than 1e-13 relative to their magnitude.
LevelSequence make_level_sequence(int n, std::vector<double> energies, const FieldParams& params);

/// Levels with |n^2 E - se_target| <= 0.1 sg.
LevelSequence window_levels(const LevelSequence& seq, double se_target, double sg);

struct SpacingEnsemble {
    std::vector<double> spacings;
    std::vector<int> manifolds;  ///< contributing n, in pooling order
    std::string window;          ///< human-readable window description
    std::string unfolding;       ///< method and degree
};

/// Polynomial fit of the cumulative staircase (default degree 3), spacings
/// from differences of the fitted staircase, then rescaled to unit mean.
/// Throws InsufficientData below 10 levels.
SpacingEnsemble unfold(const LevelSequence& seq, int degree = 3);

/// Local alternative: each raw spacing divided by the mean raw spacing over
/// `half_width` neighbours on either side (window shifted at the edges), then
/// rescaled to unit mean. Throws InsufficientData below 10 levels.
SpacingEnsemble unfold_local(const LevelSequence& seq, int half_width = 10);

/// Concatenation of per-manifold ensembles.
SpacingEnsemble pool(std::span<const SpacingEnsemble> parts);

enum class SpacingFamily { Poisson, Wigner, Brody };

/// Brody normalization [Gamma((q+2)/(q+1))]^(q+1).
double brody_alpha(double q);

/// Spacing density; q is used only for the Brody family and must lie in [0, 1].
double pdf(SpacingFamily family, double s, double q = 0.0);

/// Brody cumulative distribution 1 - exp(-alpha s^(q+1)).
double brody_cdf(double s, double q);

/// Inverse of brody_cdf; u in [0, 1).
double brody_quantile(double u, double q);

/// Mean log-likelihood per spacing of a Brody density.
double brody_log_likelihood(std::span<const double> spacings, double q);

struct BrodyFit {
    double q = 0.0;
    double q_err = 0.0;        ///< 1 / sqrt(-d2 logL / dq2) at the optimum
    double alpha = 1.0;
    double log_likelihood = 0.0;  ///< total, not per spacing
    std::size_t n_samples = 0;
};

/// Maximum-likelihood Brody parameter on [0, 1] by golden-section search.
/// Needs at least 50 spacings (InsufficientData); FitDegenerate when all are equal.
BrodyFit fit_brody(std::span<const double> spacings);

struct Histogram {
    double bin_width = 0.25;
    double s_max = 4.0;
    std::vector<double> centers;
    std::vector<double> density;  ///< count / (total samples * width)
    std::vector<std::size_t> counts;
};

Histogram histogram(std::span<const double> spacings, double bin_width = 0.25, double s_max = 4.0);

struct NnsOptions {
    bool window_first = true;  ///< false: unfold the whole manifold, then keep windowed spacings
    int degree = 3;
    bool local = false;        ///< local-window unfolding instead of the staircase fit
    int local_half_width = 10;
    double bin_width = 0.25;
    double s_max = 4.0;
    unsigned threads = 0;
};

struct ManifoldContribution {
    int n = 0;
    std::size_t levels = 0;    ///< after deduplication
    std::size_t windowed = 0;
    std::size_t spacings = 0;
};

struct NnsResult {
    double sg = 0.0;
    double sf = 0.0;
    double beta = 0.0;
    double se = 0.0;
    NnsOptions options;
    std::vector<ManifoldContribution> manifolds;
    SpacingEnsemble ensemble;
    Histogram hist;
    BrodyFit fit;
};

/// Diagonalizes every manifold at gamma = sg / n^3, f = sf / n^4, windows,
/// unfolds, pools and fits. Manifolds with fewer than 10 windowed levels are
/// skipped; InsufficientData when the pooled ensemble is too small to fit.
NnsResult nns_pipeline(double sg, double sf, double beta, std::span<const int> n_list, double se,
                       const NnsOptions& options = {});

} // namespace crossfield
