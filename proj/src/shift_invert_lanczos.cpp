#include "crossfield/shift_invert_lanczos.hpp"

#include "crossfield/errors.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

namespace crossfield {

namespace {

using SparseD = Eigen::SparseMatrix<double>;

class ShiftedSolver {
public:
    ShiftedSolver(const SparseD& shifted, double sigma)
    {
        ldlt_.compute(shifted);
        if (ldlt_.info() == Eigen::Success) {
            use_lu_ = false;
            return;
        }
        // Indefinite pencils occasionally hit a zero pivot without pivoting.
        lu_.emplace();
        lu_->analyzePattern(shifted);
        lu_->factorize(shifted);
        if (lu_->info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "shift-invert: factorization of A - sigma B failed (sigma=" << sigma
                << ", dim=" << shifted.rows() << "): " << lu_->lastErrorMessage();
            throw NumericalError(msg.str());
        }
        use_lu_ = true;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const
    {
        return use_lu_ ? Eigen::VectorXd(lu_->solve(rhs)) : Eigen::VectorXd(ldlt_.solve(rhs));
    }

private:
    Eigen::SimplicialLDLT<SparseD> ldlt_;
    std::optional<Eigen::SparseLU<SparseD>> lu_;
    bool use_lu_ = false;
};

struct Ritz {
    double value;  // lambda in the original pencil
    Eigen::VectorXd vector;
};

double max_row_sum(const SparseD& m)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseD::InnerIterator it(m, k); it; ++it) rows(it.row()) += std::abs(it.value());
    return rows.maxCoeff();
}

GeneralizedEigenpairs attempt(const SparseD& a, const SparseD& b, double sigma, std::size_t count,
                              const ShiftInvertOptions& options)
{
    const auto dim = static_cast<std::size_t>(a.rows());
    const SparseD shifted = SparseD(a - sigma * b);
    const ShiftedSolver solver(shifted, sigma);

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;

    Eigen::MatrixXd locked(static_cast<Eigen::Index>(dim), 0);
    Eigen::MatrixXd locked_b(static_cast<Eigen::Index>(dim), 0);  // B * locked
    std::vector<double> locked_values;

    const auto b_orthogonalize = [&](Eigen::VectorXd& v, const Eigen::MatrixXd& basis, const Eigen::MatrixXd& basis_b) {
        // Two passes of classical Gram-Schmidt in the B inner product.
        for (int sweep = 0; sweep < 2; ++sweep)
            if (basis.cols() > 0) v -= basis * (basis_b.transpose() * v);
    };

    // Distance from sigma of the count-th nearest locked eigenvalue.
    const auto radius = [&]() {
        if (locked_values.size() < count) return std::numeric_limits<double>::infinity();
        std::vector<double> d;
        d.reserve(locked_values.size());
        for (double v : locked_values) d.push_back(std::abs(v - sigma));
        std::nth_element(d.begin(), d.begin() + static_cast<long>(count - 1), d.end());
        return d[count - 1];
    };

    for (std::size_t pass = 0; pass < options.max_passes; ++pass) {
        const std::size_t free_dim = dim - static_cast<std::size_t>(locked.cols());
        if (free_dim == 0) break;
        const std::size_t want = std::min(free_dim, count);
        const std::size_t max_krylov = free_dim;

        Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
        b_orthogonalize(v, locked, locked_b);
        Eigen::VectorXd bv = b * v;
        v /= std::sqrt(v.dot(bv));
        bv = b * v;

        Eigen::MatrixXd basis(static_cast<Eigen::Index>(dim), 0);
        Eigen::MatrixXd basis_b(static_cast<Eigen::Index>(dim), 0);
        std::vector<double> alpha, beta;
        std::vector<Ritz> found;
        bool done = false;

        for (std::size_t j = 0; j < max_krylov && !done; ++j) {
            basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
            basis_b.conservativeResize(Eigen::NoChange, basis_b.cols() + 1);
            basis.col(basis.cols() - 1) = v;
            basis_b.col(basis_b.cols() - 1) = bv;

            Eigen::VectorXd w = solver.solve(bv);
            const double aj = w.dot(bv);
            alpha.push_back(aj);
            b_orthogonalize(w, locked, locked_b);
            b_orthogonalize(w, basis, basis_b);
            Eigen::VectorXd bw = b * w;
            const double norm2 = w.dot(bw);
            const double bj = norm2 > 0.0 ? std::sqrt(norm2) : 0.0;

            const std::size_t k = alpha.size();
            const bool invariant = bj <= 1e-14 * std::abs(aj) || k == max_krylov;
            const bool check = invariant || (k >= std::max(options.min_krylov, 2 * want) && k % 10 == 0);
            if (check) {
                Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
                for (std::size_t i = 0; i < k; ++i) {
                    t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
                    if (i + 1 < k) {
                        t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
                        t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
                    }
                }
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
                const Eigen::VectorXd& theta = tri.eigenvalues();
                std::vector<Eigen::Index> order(static_cast<std::size_t>(theta.size()));
                std::iota(order.begin(), order.end(), Eigen::Index{0});
                std::sort(order.begin(), order.end(),
                          [&](Eigen::Index l, Eigen::Index r) { return std::abs(theta(l)) > std::abs(theta(r)); });

                std::size_t converged = 0;
                const double theta_max = std::abs(theta(order.front()));
                for (std::size_t r = 0; r < std::min(want, order.size()); ++r) {
                    const Eigen::Index idx = order[r];
                    const double residual = invariant ? 0.0 : std::abs(bj * tri.eigenvectors()(static_cast<Eigen::Index>(k - 1), idx));
                    if (residual <= options.tolerance * theta_max) ++converged;
                    else break;
                }
                if (converged == std::min(want, order.size()) || invariant) {
                    for (std::size_t r = 0; r < converged; ++r) {
                        const Eigen::Index idx = order[r];
                        Eigen::VectorXd x = basis * tri.eigenvectors().col(idx);
                        found.push_back({sigma + 1.0 / theta(idx), std::move(x)});
                    }
                    done = true;
                    break;
                }
            }
            if (invariant) break;
            beta.push_back(bj);
            v = w / bj;
            bv = bw / bj;
        }

        const double before = radius();
        std::size_t inside = 0;
        for (Ritz& r : found) {
            // Re-orthogonalize against everything locked so far (Ritz vectors of one pass
            // are already mutually B-orthogonal up to rounding).
            b_orthogonalize(r.vector, locked, locked_b);
            Eigen::VectorXd br = b * r.vector;
            const double nrm = std::sqrt(r.vector.dot(br));
            if (!(nrm > 1e-8)) continue;
            r.vector /= nrm;
            br /= nrm;
            locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
            locked_b.conservativeResize(Eigen::NoChange, locked_b.cols() + 1);
            locked.col(locked.cols() - 1) = r.vector;
            locked_b.col(locked_b.cols() - 1) = br;
            locked_values.push_back(r.value);
            if (std::abs(r.value - sigma) <= before * (1.0 + 1e-9)) ++inside;
        }
        // A pass that adds nothing inside the current radius means no copy was missed.
        if (locked_values.size() >= count && inside == 0) break;
        if (found.empty()) break;
    }

    if (locked_values.size() < count) {
        std::ostringstream msg;
        msg << "shift-invert: only " << locked_values.size() << " of " << count
            << " eigenpairs converged (sigma=" << sigma << ", dim=" << dim << ")";
        throw NumericalError(msg.str());
    }

    std::vector<std::size_t> order(locked_values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return std::abs(locked_values[l] - sigma) < std::abs(locked_values[r] - sigma);
    });
    order.resize(count);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return locked_values[l] < locked_values[r]; });

    GeneralizedEigenpairs out;
    out.values.resize(static_cast<Eigen::Index>(count));
    out.vectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
        out.values(static_cast<Eigen::Index>(i)) = locked_values[order[i]];
        out.vectors.col(static_cast<Eigen::Index>(i)) = locked.col(static_cast<Eigen::Index>(order[i]));
    }
    return out;
}

/// Largest residual |A x - lambda B x| / ((|A| + |lambda| |B|) |x|) over the pairs.
double pencil_residual(const SparseD& a, const SparseD& b, const GeneralizedEigenpairs& e)
{
    const double na = max_row_sum(a);
    const double nb = max_row_sum(b);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        const Eigen::VectorXd x = e.vectors.col(i);
        const double r = (a * x - e.values(i) * (b * x)).norm();
        worst = std::max(worst, r / ((na + std::abs(e.values(i)) * nb) * x.norm()));
    }
    return worst;
}

} // namespace

GeneralizedEigenpairs shift_invert_eigs(const SparseD& a, const SparseD& b, double sigma, std::size_t count,
                                        const ShiftInvertOptions& options)
{
    const auto dim = static_cast<std::size_t>(a.rows());
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw InvalidArgument("shift_invert_eigs: dimension mismatch");
    if (count == 0 || count > dim)
        throw InvalidArgument("shift_invert_eigs: requested " + std::to_string(count) +
                              " eigenvalues from a pencil of dimension " + std::to_string(dim));

    // A shift sitting on an eigenvalue makes A - sigma B (nearly) singular and the
    // pivot-free LDLT inaccurate; such attempts fail the residual test and are
    // repeated with the shift nudged by a small relative amount.
    std::string last_error;
    const double base = 1e-7 * std::max(1.0, std::abs(sigma));
    for (const double nudge : {0.0, base, -10.0 * base, 100.0 * base}) {
        try {
            GeneralizedEigenpairs e = attempt(a, b, sigma + nudge, count, options);
            const double res = pencil_residual(a, b, e);
            if (res <= 1e-9) return e;
            last_error = "residual " + std::to_string(res) + " in the original pencil";
        } catch (const NumericalError& err) {
            last_error = err.what();
        }
    }
    throw NumericalError("shift-invert failed near sigma=" + std::to_string(sigma) + ": " + last_error);
}

} // namespace crossfield
