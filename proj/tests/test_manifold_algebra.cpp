#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crossfield/errors.hpp"
#include "crossfield/manifold_algebra.hpp"
#include "crossfield/units.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace crossfield;

namespace {

using Dense = Eigen::MatrixXcd;

Dense dense(const SparseComplex& m) { return Dense(m); }

double max_abs(const Dense& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("unit conversions")
{
    CHECK(units::gamma_from_tesla(100.0) == doctest::Approx(4.2553e-4).epsilon(1e-4));
    CHECK(units::f_from_kv_per_cm(50.0) == doctest::Approx(9.7276e-6).epsilon(1e-4));
    CHECK(units::tesla_from_gamma(units::gamma_from_tesla(7.5)) == doctest::Approx(7.5));
    CHECK(units::kv_per_cm_from_f(units::f_from_kv_per_cm(3.0)) == doctest::Approx(3.0));
    CHECK(units::radians(90.0) == std::numbers::pi / 2);
    CHECK(units::degrees(units::radians(45.0)) == doctest::Approx(45.0));
    CHECK(units::to_wavenumber(1.0) == doctest::Approx(219474.63));
}

TEST_CASE("field parameters")
{
    const FieldParams perp{1e-4, 2e-5, std::numbers::pi / 2};
    CHECK(perp.f_parallel() == 0.0);
    CHECK(perp.f_perp() == doctest::Approx(2e-5));
    const FieldParams par{1e-4, 2e-5, 0.0};
    CHECK(par.f_parallel() == 2e-5);
    CHECK(par.f_perp() == 0.0);

    CHECK_NOTHROW(perp.validate());
    CHECK_THROWS_AS((FieldParams{-1.0, 0.0, 0.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((FieldParams{0.0, -1.0, 0.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((FieldParams{0.0, 0.0, 2.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((FieldParams{0.0, 0.0, -0.1}.validate()), InvalidArgument);

    const FieldParams s = FieldParams::from_scaled(5, 0.053, 0.0061, 0.3);
    CHECK(s.gamma * 125.0 == doctest::Approx(0.053));
    CHECK(s.f * 625.0 == doctest::Approx(0.0061));
    CHECK(s.beta == 0.3);
}

TEST_CASE("half-integers and basis ordering")
{
    const HalfInteger h = HalfInteger::from_twice(3);
    CHECK(h.value() == 1.5);
    CHECK(h < HalfInteger::from_twice(5));

    CHECK_THROWS_AS(build_basis(0), InvalidArgument);
    for (int n = 1; n <= 12; ++n) {
        const ManifoldBasis b = build_basis(n);
        REQUIRE(b.size() == static_cast<std::size_t>(n * n));
        CHECK(b.j().twice() == n - 1);
        for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.index_of(b[i].m1, b[i].m2) == i);
        // m1-major, m2-minor, both ascending
        CHECK(b[0].m1.twice() == -(n - 1));
        CHECK(b[0].m2.twice() == -(n - 1));
        if (n > 1) CHECK(b[1].m2.twice() == -(n - 1) + 2);
    }
    const ManifoldBasis b3 = build_basis(3);
    CHECK_THROWS_AS(b3.index_of(HalfInteger::from_twice(4), HalfInteger::from_twice(0)), InvalidArgument);
}

TEST_CASE("spin matrices obey su(2)")
{
    for (int twice = 0; twice <= 11; ++twice) {
        const SpinMatrices s = angular_momentum_matrices(HalfInteger::from_twice(twice));
        const Dense x = dense(s.x), y = dense(s.y), z = dense(s.z);
        const Complex i(0.0, 1.0);
        CHECK(max_abs(x * y - y * x - i * z) < 1e-12);
        CHECK(max_abs(y * z - z * y - i * x) < 1e-12);
        CHECK(max_abs(z * x - x * z - i * y) < 1e-12);
        const double j = 0.5 * twice;
        const Dense casimir = x * x + y * y + z * z;
        CHECK(max_abs(casimir - j * (j + 1) * Dense::Identity(twice + 1, twice + 1)) < 1e-12);
        for (int k = 0; k <= twice; ++k) CHECK(z(k, k).real() == doctest::Approx(-j + k));
    }
}

TEST_CASE("manifold operators: commutators, Casimirs, hermiticity for n = 1..12")
{
    const Complex i(0.0, 1.0);
    for (int n = 1; n <= 12; ++n) {
        CAPTURE(n);
        const ManifoldOperators ops = manifold_operators(n);
        REQUIRE(ops.dim() == static_cast<std::size_t>(n * n));
        std::array<Dense, 3> a, b;
        for (int k = 0; k < 3; ++k) {
            a[k] = dense(ops.i1(k));
            b[k] = dense(ops.i2(k));
            CHECK(max_abs(a[k] - a[k].adjoint()) < 1e-14);
            CHECK(max_abs(b[k] - b[k].adjoint()) < 1e-14);
        }
        for (int p = 0; p < 3; ++p) {
            const int q = (p + 1) % 3;
            const int r = (p + 2) % 3;
            CHECK(max_abs(a[p] * a[q] - a[q] * a[p] - i * a[r]) < 1e-12);
            CHECK(max_abs(b[p] * b[q] - b[q] * b[p] - i * b[r]) < 1e-12);
            for (int s = 0; s < 3; ++s) CHECK(max_abs(a[p] * b[s] - b[s] * a[p]) < 1e-12);
        }
        const Dense id = Dense::Identity(n * n, n * n);
        const double c = (n * n - 1) / 4.0;
        CHECK(max_abs(dense(ops.i1_squared()) - c * id) < 1e-12);
        CHECK(max_abs(dense(ops.i2_squared()) - c * id) < 1e-12);

        // L.A = A.L = 0 on a manifold because I1^2 = I2^2 there.
        Dense la = Dense::Zero(n * n, n * n);
        Dense al = Dense::Zero(n * n, n * n);
        for (int k = 0; k < 3; ++k) {
            la += (a[k] + b[k]) * (a[k] - b[k]);
            al += (a[k] - b[k]) * (a[k] + b[k]);
        }
        CHECK(max_abs(la) < 1e-12);
        CHECK(max_abs(al) < 1e-12);
        CHECK(max_abs(la + al) < 1e-12);

        // diagonal of I1z, I2z carries (m1, m2) in basis order
        const ManifoldBasis& basis = ops.basis();
        for (std::size_t s = 0; s < basis.size(); ++s) {
            CHECK(a[2](s, s).real() == doctest::Approx(basis[s].m1.value()));
            CHECK(b[2](s, s).real() == doctest::Approx(basis[s].m2.value()));
        }
    }
}
