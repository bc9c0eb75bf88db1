#include "crossfield/perturbation.hpp"

#include "crossfield/errors.hpp"
#include "crossfield/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace crossfield {

namespace {

void require_n(int n, const char* where)
{
    if (n < 1) throw InvalidArgument(std::string(where) + ": n must be >= 1, got " + std::to_string(n));
}

void require_projection(int n, HalfInteger m, const char* name)
{
    const int twice_j = n - 1;
    if (std::abs(m.twice()) > twice_j || (m.twice() + twice_j) % 2 != 0)
        throw InvalidArgument(std::string(name) + "=" + std::to_string(m.value()) +
                              " is not a projection for n=" + std::to_string(n));
}

double axis_angle(const Eigen::Vector3d& v)
{
    const double norm = v.norm();
    if (norm == 0.0) return 0.0;
    return std::acos(std::clamp(v.z() / norm, -1.0, 1.0));
}

bool is_perpendicular(double beta) { return std::abs(beta - std::numbers::pi / 2) < 1e-12; }

} // namespace

OmegaPair omega_vectors(int n, const FieldParams& params)
{
    require_n(n, "omega_vectors");
    params.validate();
    const Eigen::Vector3d gamma_vec(0.0, 0.0, params.gamma);
    const Eigen::Vector3d f_vec(params.f_perp(), 0.0, params.f_parallel());
    const double nn = static_cast<double>(n);

    OmegaPair out;
    out.omega1 = 0.5 * (gamma_vec - 3.0 * nn * f_vec);
    out.omega2 = 0.5 * (gamma_vec + 3.0 * nn * f_vec);
    out.alpha1 = axis_angle(out.omega1);
    out.alpha2 = axis_angle(out.omega2);
    return out;
}

double first_order_energy(int n, HalfInteger nprime, HalfInteger ndprime, const OmegaPair& omega)
{
    require_n(n, "first_order_energy");
    require_projection(n, nprime, "n'");
    require_projection(n, ndprime, "n''");
    return omega.magnitude1() * nprime.value() + omega.magnitude2() * ndprime.value();
}

double second_order_energy_conventional(int n, HalfInteger nprime, HalfInteger ndprime,
                                        const FieldParams& params)
{
    require_n(n, "second_order_energy_conventional");
    require_projection(n, nprime, "n'");
    require_projection(n, ndprime, "n''");
    params.validate();
    if (is_perpendicular(params.beta) && params.gamma > 0.0 && params.f > 0.0)
        throw UnsupportedConfiguration(
            "conventional second-order energy is undefined for perpendicular fields "
            "(omega1 = omega2 leaves first-order degeneracies); use the extended matrix");

    const OmegaPair omega = omega_vectors(n, params);
    const double a1 = omega.alpha1;
    const double a2 = omega.alpha2;
    const double p = nprime.value();
    const double q = ndprime.value();
    const double n2 = static_cast<double>(n) * n;
    const double n4 = n2 * n2;
    const double f2 = params.f * params.f;
    const double g2 = params.gamma * params.gamma;

    const double stark = -(n4 * f2 / 16.0) * (17.0 * n2 + 19.0 - 12.0 * (p * p + p * q * std::cos(a1 + a2) + q * q));
    const double c1 = std::cos(a1);
    const double c2 = std::cos(a2);
    const double diamagnetic =
        (n2 * g2 / 48.0) *
        (7.0 * n2 + 5.0 + 4.0 * p * q * std::sin(a1) * std::sin(a2) + (n2 - 1.0) * (c1 * c1 + c2 * c2) -
         12.0 * (p * p * c1 * c1 - p * q * c1 * c2 + q * q * c2 * c2));
    return stark + diamagnetic;
}

std::vector<double> conventional_spectrum(int n, const FieldParams& params)
{
    const OmegaPair omega = omega_vectors(n, params);
    const double base = -0.5 / (static_cast<double>(n) * n);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    const ManifoldBasis basis = build_basis(n);
    for (const ManifoldState& s : basis.states())
        out.push_back(base + first_order_energy(n, s.m1, s.m2, omega) +
                      second_order_energy_conventional(n, s.m1, s.m2, params));
    std::sort(out.begin(), out.end());
    return out;
}

SparseComplex extended_operator(int n, const FieldParams& params, const ManifoldOperators& ops)
{
    require_n(n, "extended_operator");
    if (ops.n() != n)
        throw InvalidArgument("extended_operator: operators built for n=" + std::to_string(ops.n()) +
                              ", requested n=" + std::to_string(n));
    params.validate();

    const auto dim = static_cast<Eigen::Index>(ops.dim());
    const double nn = static_cast<double>(n);
    const double n2 = nn * nn;
    const OmegaPair omega = omega_vectors(n, params);

    SparseComplex identity(dim, dim);
    identity.setIdentity();

    // L = I1 + I2, A = I1 - I2, component-wise.
    std::array<SparseComplex, 3> L, A;
    for (int k = 0; k < 3; ++k) {
        L[static_cast<std::size_t>(k)] = ops.i1(k) + ops.i2(k);
        A[static_cast<std::size_t>(k)] = ops.i1(k) - ops.i2(k);
    }
    const auto square = [](const SparseComplex& m) { return SparseComplex(m * m); };

    // V1 = omega1 . I1 + omega2 . I2 (omega vectors have no y component)
    SparseComplex total = omega.omega1.x() * ops.i1(0) + omega.omega1.z() * ops.i1(2) +
                          omega.omega2.x() * ops.i2(0) + omega.omega2.z() * ops.i2(2);

    if (params.gamma > 0.0) {
        const SparseComplex a_squared = square(A[0]) + square(A[1]) + square(A[2]);
        const double scale = n2 * params.gamma * params.gamma / 16.0;
        total += scale * (SparseComplex((n2 + 3.0) * identity) + square(L[2]) + 4.0 * a_squared -
                          5.0 * square(A[2]));
    }
    if (params.f > 0.0) {
        const double sin_b = params.f_perp() / params.f;
        const double cos_b = params.f_parallel() / params.f;
        const SparseComplex l_squared = square(L[0]) + square(L[1]) + square(L[2]);
        const SparseComplex l_f = sin_b * L[0] + cos_b * L[2];
        const SparseComplex a_f = sin_b * A[0] + cos_b * A[2];
        const double scale = -n2 * n2 * params.f * params.f / 16.0;
        total += scale * (SparseComplex((5.0 * n2 + 31.0) * identity) + 24.0 * l_squared -
                          21.0 * square(l_f) + 9.0 * square(a_f));
    }
    total.prune(Complex(0.0, 0.0));
    total.makeCompressed();
    return total;
}

Eigen::MatrixXd build_extended_matrix(int n, const FieldParams& params, const ManifoldOperators& ops)
{
    const SparseComplex op = extended_operator(n, params, ops);
    const auto dim = op.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    double worst_imag = 0.0;
    for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
        for (SparseComplex::InnerIterator it(op, col); it; ++it) {
            out(it.row(), it.col()) = it.value().real();
            worst_imag = std::max(worst_imag, std::abs(it.value().imag()));
        }
    }
    if (worst_imag > 1e-12)
        throw NumericalError("extended matrix is not real in the parabolic basis: |Im| = " +
                             std::to_string(worst_imag));
    return out;
}

double extended_trace_closed_form(int n, const FieldParams& params)
{
    require_n(n, "extended_trace_closed_form");
    params.validate();
    const double n2 = static_cast<double>(n) * n;
    // Trace of the square of any Cartesian component of L (or A) over the manifold.
    const double component = n2 * (n2 - 1.0) / 6.0;
    const double diamagnetic = n2 * params.gamma * params.gamma / 16.0 * (n2 * (n2 + 3.0) + 8.0 * component);
    const double stark = -n2 * n2 * params.f * params.f / 16.0 * (n2 * (5.0 * n2 + 31.0) + 60.0 * component);
    return -0.5 + diamagnetic + stark;
}

ManifoldSpectrum diagonalize_manifold(const Eigen::MatrixXd& hamiltonian, int n, const FieldParams& params,
                                      bool with_vectors)
{
    if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0)
        throw InvalidArgument("diagonalize_manifold: matrix must be square and nonempty");
    const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
    const double asymmetry = (hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff();
    if (asymmetry > 1e-10 * scale)
        throw InvalidArgument("diagonalize_manifold: matrix not symmetric (max |H - H^T| = " +
                              std::to_string(asymmetry) + ")");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        hamiltonian, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("diagonalize_manifold: eigensolver did not converge");

    ManifoldSpectrum out;
    out.n = n;
    out.params = params;
    const Eigen::VectorXd& values = solver.eigenvalues();
    out.energies.assign(values.data(), values.data() + values.size());
    if (with_vectors) out.vectors = solver.eigenvectors();

    const double trace = hamiltonian.trace();
    double sum = 0.0;
    for (double e : out.energies) sum += e;
    if (std::abs(sum - trace) > 1e-10 * std::max(std::abs(trace), hamiltonian.cwiseAbs().maxCoeff()))
        throw NumericalError("diagonalize_manifold: eigenvalue sum deviates from the trace");
    return out;
}

ManifoldSpectrum solve_manifold(const ManifoldOperators& ops, const FieldParams& params, bool with_vectors)
{
    const int n = ops.n();
    Eigen::MatrixXd h = build_extended_matrix(n, params, ops);
    h.diagonal().array() -= 0.5 / (static_cast<double>(n) * n);
    return diagonalize_manifold(h, n, params, with_vectors);
}

ManifoldSpectrum solve_manifold(int n, const FieldParams& params, bool with_vectors)
{
    return solve_manifold(manifold_operators(n), params, with_vectors);
}

EBetaScan ebeta_scan(std::span<const int> n_list, double gamma, double f, std::span<const double> beta_grid,
                     unsigned threads)
{
    if (beta_grid.empty()) throw InvalidArgument("ebeta_scan: empty beta grid");
    if (n_list.empty()) throw InvalidArgument("ebeta_scan: empty manifold list");
    for (std::size_t i = 1; i < beta_grid.size(); ++i)
        if (!(beta_grid[i] > beta_grid[i - 1])) throw InvalidArgument("ebeta_scan: beta grid must ascend");
    for (double beta : beta_grid) FieldParams{gamma, f, beta}.validate();
    for (int n : n_list) require_n(n, "ebeta_scan");

    EBetaScan scan;
    scan.n_list.assign(n_list.begin(), n_list.end());
    scan.betas.assign(beta_grid.begin(), beta_grid.end());
    scan.gamma = gamma;
    scan.f = f;
    scan.spectra.resize(n_list.size() * beta_grid.size());

    std::vector<ManifoldOperators> ops;
    ops.reserve(n_list.size());
    for (int n : n_list) ops.push_back(manifold_operators(n));

    parallel_for(scan.spectra.size(), threads, [&](std::size_t k) {
        const std::size_t ni = k / beta_grid.size();
        const std::size_t bi = k % beta_grid.size();
        scan.spectra[k] = solve_manifold(ops[ni], FieldParams{gamma, f, beta_grid[bi]});
    });
    return scan;
}

std::vector<GapMinimum> find_gap_minima(std::span<const double> betas, const std::vector<std::vector<double>>& levels)
{
    if (betas.size() != levels.size()) throw InvalidArgument("find_gap_minima: grid/level size mismatch");
    std::vector<GapMinimum> out;
    if (betas.size() < 3 || levels.front().size() < 2) return out;
    const std::size_t count = levels.front().size();
    for (const auto& row : levels)
        if (row.size() != count) throw InvalidArgument("find_gap_minima: ragged level table");

    const auto gap = [&](std::size_t i, std::size_t k) { return levels[i][k + 1] - levels[i][k]; };
    for (std::size_t k = 0; k + 1 < count; ++k) {
        for (std::size_t i = 1; i + 1 < betas.size(); ++i) {
            const double g0 = gap(i - 1, k), g1 = gap(i, k), g2 = gap(i + 1, k);
            if (!(g1 < g0 && g1 <= g2)) continue;

            // Vertex of the parabola through the three samples.
            const double x0 = betas[i - 1], x1 = betas[i], x2 = betas[i + 1];
            const double d01 = (g1 - g0) / (x1 - x0);
            const double d12 = (g2 - g1) / (x2 - x1);
            const double curvature = (d12 - d01) / (x2 - x0);
            double x = x1, value = g1;
            if (curvature > 0.0) {
                x = std::clamp(0.5 * (x0 + x1) - d01 / (2.0 * curvature), x0, x2);
                value = g0 + d01 * (x - x0) + curvature * (x - x0) * (x - x1);
            }
            out.push_back({x, k, std::max(0.0, value)});
        }
    }
    std::sort(out.begin(), out.end(), [](const GapMinimum& a, const GapMinimum& b) {
        return a.beta != b.beta ? a.beta < b.beta : a.lower_level < b.lower_level;
    });
    return out;
}

std::vector<GapMinimum> min_gap_analysis(const EBetaScan& scan, int n)
{
    const auto it = std::find(scan.n_list.begin(), scan.n_list.end(), n);
    if (it == scan.n_list.end()) throw InvalidArgument("min_gap_analysis: n=" + std::to_string(n) + " not in scan");
    const auto ni = static_cast<std::size_t>(it - scan.n_list.begin());
    std::vector<std::vector<double>> levels;
    levels.reserve(scan.betas.size());
    for (std::size_t bi = 0; bi < scan.betas.size(); ++bi) levels.push_back(scan.at(ni, bi).energies);
    return find_gap_minima(scan.betas, levels);
}

double stark_saddle_energy(double f)
{
    if (!(f > 0.0)) throw InvalidArgument("stark_saddle_energy: f must be > 0");
    return -2.0 * std::sqrt(f);
}

} // namespace crossfield
