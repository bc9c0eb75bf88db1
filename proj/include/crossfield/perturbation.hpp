#pragma once

#include "crossfield/manifold_algebra.hpp"
#include "crossfield/units.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace crossfield {

/// Precession vectors of the first-order secular motion,
/// omega_{1,2} = (gamma_vec -/+ 3 n f_vec) / 2.
struct OmegaPair {
    Eigen::Vector3d omega1 = Eigen::Vector3d::Zero();
    Eigen::Vector3d omega2 = Eigen::Vector3d::Zero();
    /// Unsigned angles in [0, pi] between the magnetic axis and omega1, omega2.
    /// Zero when the corresponding vector vanishes.
    double alpha1 = 0.0;
    double alpha2 = 0.0;

    double magnitude1() const { return omega1.norm(); }
    double magnitude2() const { return omega2.norm(); }
    /// True when omega1 (resp. omega2) cancels exactly, gamma_vec = +/- 3 n f_vec.
    bool degenerate1() const { return omega1.isZero(0.0); }
    bool degenerate2() const { return omega2.isZero(0.0); }
};

OmegaPair omega_vectors(int n, const FieldParams& params);

/// E1 = |omega1| n' + |omega2| n'' for projections n', n'' of I1, I2 on their
/// omega axes. Throws InvalidArgument for projections outside the manifold.
double first_order_energy(int n, HalfInteger nprime, HalfInteger ndprime, const OmegaPair& omega);

/// Closed-form second-order correction <n n' n''| V2 + W |n n' n''>.
/// Throws UnsupportedConfiguration for perpendicular fields with both fields
/// on, where first-order theory leaves degenerate pairs.
double second_order_energy_conventional(int n, HalfInteger nprime, HalfInteger ndprime,
                                        const FieldParams& params);

/// All n^2 conventional energies -1/(2n^2) + E1 + E2, ascending.
std::vector<double> conventional_spectrum(int n, const FieldParams& params);

/// V1 + V2 + W on the manifold as a complex Hermitian operator.
///
/// Every second-order term is a square of a Hermitian operator (L_z^2, A^2,
/// A_z^2, L^2, L_f^2, A_f^2), so no operator-ordering choice enters.
SparseComplex extended_operator(int n, const FieldParams& params, const ManifoldOperators& ops);

/// Real symmetric form of V1 + V2 + W. The full manifold Hamiltonian is
/// -1/(2n^2) + this matrix. Throws InvalidArgument if ops belong to another n
/// and NumericalError if an imaginary part survives (> 1e-12).
Eigen::MatrixXd build_extended_matrix(int n, const FieldParams& params, const ManifoldOperators& ops);

/// Trace of -1/(2n^2) + V1 + V2 + W from the closed-form traces of the
/// quadratic invariants over an isotropic manifold.
double extended_trace_closed_form(int n, const FieldParams& params);

struct ManifoldSpectrum {
    int n = 0;
    FieldParams params;
    std::vector<double> energies;                ///< ascending, atomic units
    std::optional<Eigen::MatrixXd> vectors;      ///< columns in ManifoldBasis order
};

/// Diagonalizes a full manifold Hamiltonian. Throws InvalidArgument if the
/// input is not symmetric to 1e-10 and NumericalError if the eigenvalue sum
/// misses the trace by more than 1e-10 relative.
ManifoldSpectrum diagonalize_manifold(const Eigen::MatrixXd& hamiltonian, int n,
                                      const FieldParams& params, bool with_vectors = false);

/// Builds and diagonalizes -1/(2n^2) + V1 + V2 + W.
ManifoldSpectrum solve_manifold(int n, const FieldParams& params, bool with_vectors = false);
ManifoldSpectrum solve_manifold(const ManifoldOperators& ops, const FieldParams& params,
                                bool with_vectors = false);

/// Spectra on an (n, beta) grid, stored n-major.
struct EBetaScan {
    std::vector<int> n_list;
    std::vector<double> betas;      ///< radians, ascending
    double gamma = 0.0;
    double f = 0.0;
    std::vector<ManifoldSpectrum> spectra;

    const ManifoldSpectrum& at(std::size_t n_index, std::size_t beta_index) const
    {
        return spectra[n_index * betas.size() + beta_index];
    }
};

/// Throws InvalidArgument on an empty or unordered grid or beta outside [0, pi/2].
EBetaScan ebeta_scan(std::span<const int> n_list, double gamma, double f,
                     std::span<const double> beta_grid, unsigned threads = 0);

struct GapMinimum {
    double beta = 0.0;           ///< radians, from a parabola through three grid points
    std::size_t lower_level = 0; ///< the pair is (lower_level, lower_level + 1)
    double gap = 0.0;            ///< au, clamped at zero
};

/// Local minima along the grid of every adjacent-level gap. `levels[i]` holds
/// the ascending levels at `betas[i]`; all rows must have equal length.
std::vector<GapMinimum> find_gap_minima(std::span<const double> betas,
                                        const std::vector<std::vector<double>>& levels);

/// Gap minima of manifold n in a scan. Needs at least three beta points.
std::vector<GapMinimum> min_gap_analysis(const EBetaScan& scan, int n);

/// Energy of the Stark saddle point, -2 sqrt(f). Throws InvalidArgument for f <= 0.
double stark_saddle_energy(double f);

} // namespace crossfield
