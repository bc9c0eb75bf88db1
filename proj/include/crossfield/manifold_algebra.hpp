#pragma once

#include <Eigen/SparseCore>

#include <array>
#include <complex>
#include <compare>
#include <cstddef>
#include <vector>

namespace crossfield {

using Complex = std::complex<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

/// A half-integer stored as twice its value, so that j = (n-1)/2 and the
/// projections m in {-j, ..., j} stay exact.
class HalfInteger {
public:
    constexpr HalfInteger() = default;
    static constexpr HalfInteger from_twice(int twice) { return HalfInteger(twice); }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }

    constexpr auto operator<=>(const HalfInteger&) const = default;

private:
    constexpr explicit HalfInteger(int twice) : twice_(twice) {}
    int twice_ = 0;
};

struct ManifoldState {
    HalfInteger m1;
    HalfInteger m2;
};

/// The n^2 parabolic states of one n-manifold, ordered m1-major, m2-minor,
/// each projection ascending from -j to +j.
class ManifoldBasis {
public:
    int n() const { return n_; }
    HalfInteger j() const { return HalfInteger::from_twice(n_ - 1); }
    std::size_t size() const { return states_.size(); }
    const std::vector<ManifoldState>& states() const { return states_; }
    const ManifoldState& operator[](std::size_t i) const { return states_[i]; }

    /// Position of (m1, m2) in the ordering; throws InvalidArgument if out of range.
    std::size_t index_of(HalfInteger m1, HalfInteger m2) const;

private:
    friend ManifoldBasis build_basis(int n);
    int n_ = 0;
    std::vector<ManifoldState> states_;
};

ManifoldBasis build_basis(int n);

/// Spin matrices of dimension 2j+1 in the |j m> basis with ascending m.
struct SpinMatrices {
    SparseComplex x, y, z;
};

SpinMatrices angular_momentum_matrices(HalfInteger j);

/// Components of I1 = J (x) 1 and I2 = 1 (x) J on one manifold.
///
/// Stored sparse: every component has at most two nonzeros per row, and the
/// quadratic forms built from them stay banded.
class ManifoldOperators {
public:
    const ManifoldBasis& basis() const { return basis_; }
    int n() const { return basis_.n(); }
    std::size_t dim() const { return basis_.size(); }

    /// Component k (0=x, 1=y, 2=z) of I1 or I2.
    const SparseComplex& i1(int k) const { return i1_[static_cast<std::size_t>(k)]; }
    const SparseComplex& i2(int k) const { return i2_[static_cast<std::size_t>(k)]; }

    /// Squared norm operator of I1 (identical for I2): (n^2 - 1)/4 times identity.
    SparseComplex i1_squared() const;
    SparseComplex i2_squared() const;

private:
    friend ManifoldOperators manifold_operators(int n);
    ManifoldBasis basis_;
    std::array<SparseComplex, 3> i1_;
    std::array<SparseComplex, 3> i2_;
};

ManifoldOperators manifold_operators(int n);

} // namespace crossfield
