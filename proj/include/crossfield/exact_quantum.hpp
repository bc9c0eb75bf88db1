#pragma once

#include "crossfield/oscillator_basis.hpp"
#include "crossfield/shift_invert_lanczos.hpp"
#include "crossfield/units.hpp"

#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace crossfield {

/// Left and right sides of the dilated semiparabolic eigenproblem H c = lambda B c,
/// with lambda = -(1 + 2 b^4 E).
struct GeneralizedPair {
    Eigen::SparseMatrix<double> h;
    Eigen::SparseMatrix<double> b_matrix;   ///< mu^2 + nu^2
    double b = 1.0;                         ///< dilation length
    FieldParams params;
    std::vector<OscBasisState> basis;
};

double lambda_from_energy(double energy, double b);
double energy_from_lambda(double lambda, double b);

/// Throws InvalidArgument for b <= 0 or an empty truncation.
GeneralizedPair assemble_matrices(const TruncationScheme& scheme, double b, const FieldParams& params);

struct BoundStates {
    std::vector<double> energies;  ///< au, ascending
    std::vector<double> lambdas;   ///< matching eigenvalues of the pencil
    double b = 1.0;
    std::size_t basis_size = 0;
};

/// The `count` bound states nearest `shift` (au). The shift must lie below
/// the Stark saddle energy (below 0 without electric field).
/// Throws InvalidArgument for count > basis size or an unbound shift,
/// NumericalError when the shifted pencil cannot be factorized.
BoundStates solve_bound_states(const GeneralizedPair& pair, std::size_t count, double shift,
                               const ShiftInvertOptions& options = {});

/// Default dilation for manifold n: b^2 = n puts the field-free level at lambda = 0.
inline double default_dilation(int n) { return std::sqrt(static_cast<double>(n)); }

struct ConvergenceTarget {
    double shift = 0.0;     ///< au
    std::size_t count = 1;
};

struct ConvergenceEntry {
    std::size_t scheme_index = 0;
    TruncationScheme scheme;
    std::size_t basis_size = 0;
    double b = 1.0;
    std::vector<double> energies;
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;   ///< scheme-major, then b
    std::vector<double> reference;           ///< largest scheme, averaged over b
    std::vector<double> b_spread;            ///< per state, largest scheme, max - min over b
    std::vector<double> basis_drift;         ///< per state, max over b of |E(largest) - E(next largest)|
    std::vector<bool> monotone;              ///< per state, energy monotone along the ladder at the first b
    std::vector<bool> converged;             ///< b_spread and basis_drift both below tolerance
    double tolerance = 0.0;

    const ConvergenceEntry& at(std::size_t scheme_index, std::size_t b_index, std::size_t b_count) const
    {
        return entries[scheme_index * b_count + b_index];
    }
};

/// Solves the same target on every (scheme, b) pair and flags the states
/// whose energies are stable in both directions. Needs at least two schemes
/// and two dilations.
ConvergenceReport convergence_scan(std::span<const TruncationScheme> ladder, std::span<const double> b_grid,
                                   const FieldParams& params, const ConvergenceTarget& target, double tolerance,
                                   unsigned threads = 0);

} // namespace crossfield
