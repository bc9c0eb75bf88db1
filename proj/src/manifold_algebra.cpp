#include "crossfield/manifold_algebra.hpp"

#include "crossfield/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace crossfield {

std::size_t ManifoldBasis::index_of(HalfInteger m1, HalfInteger m2) const
{
    const int twice_j = n_ - 1;
    const auto in_range = [twice_j](HalfInteger m) {
        return std::abs(m.twice()) <= twice_j && (m.twice() + twice_j) % 2 == 0;
    };
    if (!in_range(m1) || !in_range(m2))
        throw InvalidArgument("projection out of range for n=" + std::to_string(n_));
    const auto i1 = static_cast<std::size_t>((m1.twice() + twice_j) / 2);
    const auto i2 = static_cast<std::size_t>((m2.twice() + twice_j) / 2);
    return i1 * static_cast<std::size_t>(n_) + i2;
}

ManifoldBasis build_basis(int n)
{
    if (n < 1) throw InvalidArgument("build_basis: n must be >= 1, got " + std::to_string(n));
    ManifoldBasis basis;
    basis.n_ = n;
    basis.states_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    const int twice_j = n - 1;
    for (int a = -twice_j; a <= twice_j; a += 2)
        for (int b = -twice_j; b <= twice_j; b += 2)
            basis.states_.push_back({HalfInteger::from_twice(a), HalfInteger::from_twice(b)});
    return basis;
}

SpinMatrices angular_momentum_matrices(HalfInteger j)
{
    if (j.twice() < 0) throw InvalidArgument("angular_momentum_matrices: 2j must be >= 0");
    const int dim = j.twice() + 1;
    const double jj = j.value();

    using Triplet = Eigen::Triplet<Complex>;
    std::vector<Triplet> tx, ty, tz;
    for (int k = 0; k < dim; ++k) {
        const double m = -jj + k;
        tz.emplace_back(k, k, Complex(m, 0.0));
        if (k + 1 < dim) {
            // <m+1| J+ |m>
            const double raise = std::sqrt(jj * (jj + 1.0) - m * (m + 1.0));
            // Jx = (J+ + J-)/2, Jy = (J+ - J-)/(2i)
            tx.emplace_back(k + 1, k, Complex(0.5 * raise, 0.0));
            tx.emplace_back(k, k + 1, Complex(0.5 * raise, 0.0));
            ty.emplace_back(k + 1, k, Complex(0.0, -0.5 * raise));
            ty.emplace_back(k, k + 1, Complex(0.0, 0.5 * raise));
        }
    }
    SpinMatrices out{SparseComplex(dim, dim), SparseComplex(dim, dim), SparseComplex(dim, dim)};
    out.x.setFromTriplets(tx.begin(), tx.end());
    out.y.setFromTriplets(ty.begin(), ty.end());
    out.z.setFromTriplets(tz.begin(), tz.end());
    return out;
}

SparseComplex ManifoldOperators::i1_squared() const
{
    return SparseComplex(i1_[0] * i1_[0] + i1_[1] * i1_[1] + i1_[2] * i1_[2]);
}

SparseComplex ManifoldOperators::i2_squared() const
{
    return SparseComplex(i2_[0] * i2_[0] + i2_[1] * i2_[1] + i2_[2] * i2_[2]);
}

ManifoldOperators manifold_operators(int n)
{
    ManifoldOperators ops;
    ops.basis_ = build_basis(n);

    const SpinMatrices spin = angular_momentum_matrices(ops.basis_.j());
    SparseComplex identity(n, n);
    identity.setIdentity();

    const std::array<const SparseComplex*, 3> components{&spin.x, &spin.y, &spin.z};
    for (std::size_t k = 0; k < 3; ++k) {
        ops.i1_[k] = Eigen::kroneckerProduct(*components[k], identity).eval();
        ops.i2_[k] = Eigen::kroneckerProduct(identity, *components[k]).eval();
        ops.i1_[k].makeCompressed();
        ops.i2_[k].makeCompressed();
    }
    return ops;
}

} // namespace crossfield
