#pragma once

#include <Eigen/SparseCore>

#include <compare>
#include <cstddef>
#include <unordered_map>
#include <vector>

namespace crossfield {

/// Product state |N_mu m> x |N_nu m> of two 2D oscillators sharing the
/// azimuthal quantum number m.
struct OscBasisState {
    int n_mu = 0;
    int n_nu = 0;
    int m = 0;

    int quanta() const;   ///< 2 N_mu + 2 N_nu + 2 |m|
    /// Principal quantum number of the field-free level this state represents
    /// exactly when b^2 = n: N_mu + N_nu + |m| + 1.
    int principal() const { return n_mu + n_nu + (m < 0 ? -m : m) + 1; }

    friend bool operator==(const OscBasisState&, const OscBasisState&) = default;
};

struct TruncationScheme {
    int max_quanta = 0;   ///< cap on 2 N_mu + 2 N_nu + 2 |m|
    int m_min = 0;
    int m_max = 0;
};

/// States ordered by (|m|, m, N_mu + N_nu, N_mu). Throws InvalidArgument if
/// the scheme admits no state.
std::vector<OscBasisState> enumerate_basis(const TruncationScheme& scheme);

/// Index lookup for an enumerated basis.
class OscBasisIndex {
public:
    explicit OscBasisIndex(const std::vector<OscBasisState>& states);
    /// Position of s, or -1 when s is outside the truncation.
    long find(const OscBasisState& s) const;

private:
    std::unordered_map<long long, long> index_;
};

/// Radial matrix elements between normalized 2D oscillator functions
/// R_{N,a}(rho) = sqrt(2 N!/(N+a)!) rho^a L_N^a(rho^2) exp(-rho^2/2),
/// orthonormal with weight rho d rho. All closed forms follow from the
/// Laguerre recurrences; no quadrature is involved.
namespace radial {

/// <N'a| rho^2 |N a>
double rho2(int n_out, int n_in, int a);
/// <N'a| rho^4 |N a>
double rho4(int n_out, int n_in, int a);
/// <N'a'| rho |N a> for a' = a +/- 1
double rho_shift(int n_out, int a_out, int n_in, int a_in);
/// <N'a'| rho^3 |N a> for a' = a +/- 1
double rho3_shift(int n_out, int a_out, int n_in, int a_in);

} // namespace radial

/// Multiplicative and kinetic pieces of the semiparabolic Schroedinger
/// equation, each as a matrix on the product basis.
enum class OscillatorTerm {
    Kinetic,            ///< Delta_mu + Delta_nu - (mu^2 + nu^2), diagonal
    MuSquared,          ///< mu^2
    NuSquared,          ///< nu^2
    MuFourth,           ///< mu^4
    NuFourth,           ///< nu^4
    MuSquaredNuSquared, ///< mu^2 nu^2
    Diamagnetic,        ///< mu^2 nu^2 (mu^2 + nu^2)
    PerpStark,          ///< mu nu (mu^2 + nu^2) cos(phi), couples m -> m +/- 1
    AngularMomentum,    ///< (mu^2 + nu^2) i d/dphi, diagonal in m with value -m (mu^2 + nu^2)
};

Eigen::SparseMatrix<double> term_matrix(const std::vector<OscBasisState>& basis, OscillatorTerm term);

} // namespace crossfield
