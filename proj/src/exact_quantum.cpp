#include "crossfield/exact_quantum.hpp"

#include "crossfield/errors.hpp"
#include "crossfield/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace crossfield {

double lambda_from_energy(double energy, double b) { return -(1.0 + 2.0 * std::pow(b, 4) * energy); }

double energy_from_lambda(double lambda, double b) { return -(1.0 + lambda) / (2.0 * std::pow(b, 4)); }

GeneralizedPair assemble_matrices(const TruncationScheme& scheme, double b, const FieldParams& params)
{
    if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("assemble_matrices: b must be > 0");
    params.validate();

    GeneralizedPair pair;
    pair.b = b;
    pair.params = params;
    pair.basis = enumerate_basis(scheme);

    const double b2 = b * b;
    const double b4 = b2 * b2;
    const double b6 = b4 * b2;
    const auto dim = static_cast<Eigen::Index>(pair.basis.size());

    Eigen::SparseMatrix<double> identity(dim, dim);
    identity.setIdentity();

    const auto term = [&](OscillatorTerm t) { return term_matrix(pair.basis, t); };

    pair.b_matrix = term(OscillatorTerm::MuSquared) + term(OscillatorTerm::NuSquared);

    Eigen::SparseMatrix<double> h = term(OscillatorTerm::Kinetic) + 4.0 * b2 * identity;
    if (params.gamma > 0.0) {
        const double g = b4 * params.gamma;
        h += g * term(OscillatorTerm::AngularMomentum);
        h -= 0.25 * g * g * term(OscillatorTerm::Diamagnetic);
    }
    if (const double f_par = params.f_parallel(); f_par != 0.0)
        h -= b6 * f_par * (term(OscillatorTerm::MuFourth) - term(OscillatorTerm::NuFourth));
    if (const double f_perp = params.f_perp(); f_perp != 0.0)
        h -= 2.0 * b6 * f_perp * term(OscillatorTerm::PerpStark);

    h.prune(0.0);
    h.makeCompressed();
    pair.b_matrix.makeCompressed();
    pair.h = std::move(h);
    return pair;
}

BoundStates solve_bound_states(const GeneralizedPair& pair, std::size_t count, double shift,
                               const ShiftInvertOptions& options)
{
    if (count > pair.basis.size())
        throw InvalidArgument("solve_bound_states: requested " + std::to_string(count) + " states from a basis of " +
                              std::to_string(pair.basis.size()));
    const double threshold = pair.params.f > 0.0 ? -2.0 * std::sqrt(pair.params.f) : 0.0;
    if (!(shift < threshold))
        throw InvalidArgument("solve_bound_states: shift " + std::to_string(shift) +
                              " au is not below the ionization threshold " + std::to_string(threshold));

    const double sigma = lambda_from_energy(shift, pair.b);
    const GeneralizedEigenpairs eig = shift_invert_eigs(pair.h, pair.b_matrix, sigma, count, options);

    BoundStates out;
    out.b = pair.b;
    out.basis_size = pair.basis.size();
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        out.lambdas.push_back(eig.values(i));
        out.energies.push_back(energy_from_lambda(eig.values(i), pair.b));
    }
    // E decreases with lambda.
    std::reverse(out.lambdas.begin(), out.lambdas.end());
    std::reverse(out.energies.begin(), out.energies.end());
    return out;
}

ConvergenceReport convergence_scan(std::span<const TruncationScheme> ladder, std::span<const double> b_grid,
                                   const FieldParams& params, const ConvergenceTarget& target, double tolerance,
                                   unsigned threads)
{
    if (ladder.size() < 2 || b_grid.size() < 2)
        throw InvalidArgument("convergence_scan: needs at least two truncations and two dilations");

    ConvergenceReport report;
    report.tolerance = tolerance;
    report.entries.resize(ladder.size() * b_grid.size());
    parallel_for(report.entries.size(), threads, [&](std::size_t k) {
        const std::size_t si = k / b_grid.size();
        const std::size_t bi = k % b_grid.size();
        const GeneralizedPair pair = assemble_matrices(ladder[si], b_grid[bi], params);
        const BoundStates states = solve_bound_states(pair, target.count, target.shift);
        report.entries[k] = {si, ladder[si], states.basis_size, b_grid[bi], states.energies};
    });

    const std::size_t nb = b_grid.size();
    const std::size_t last = ladder.size() - 1;
    const std::size_t count = target.count;
    report.reference.assign(count, 0.0);
    report.b_spread.assign(count, 0.0);
    report.basis_drift.assign(count, 0.0);
    report.monotone.assign(count, true);
    report.converged.assign(count, false);

    for (std::size_t k = 0; k < count; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t bi = 0; bi < nb; ++bi) {
            const double e = report.at(last, bi, nb).energies[k];
            report.reference[k] += e / static_cast<double>(nb);
            lo = std::min(lo, e);
            hi = std::max(hi, e);
            report.basis_drift[k] = std::max(report.basis_drift[k], std::abs(e - report.at(last - 1, bi, nb).energies[k]));
        }
        report.b_spread[k] = hi - lo;

        int direction = 0;
        for (std::size_t si = 1; si < ladder.size(); ++si) {
            const double step = report.at(si, 0, nb).energies[k] - report.at(si - 1, 0, nb).energies[k];
            const int sign = step > 0.0 ? 1 : (step < 0.0 ? -1 : 0);
            if (sign != 0 && direction != 0 && sign != direction) report.monotone[k] = false;
            if (sign != 0) direction = sign;
        }
        report.converged[k] = report.b_spread[k] < tolerance && report.basis_drift[k] < tolerance;
    }
    return report;
}

} // namespace crossfield
