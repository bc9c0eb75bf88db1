#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crossfield/errors.hpp"
#include "crossfield/secular_dynamics.hpp"
#include "crossfield/surface_of_section.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace crossfield;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_on_sphere(std::mt19937_64& rng, double radius)
{
    std::normal_distribution<double> n;
    Vec3 v(n(rng), n(rng), n(rng));
    return radius * v.normalized();
}

SecularState random_state(std::mt19937_64& rng) { return {random_on_sphere(rng, 0.5), random_on_sphere(rng, 0.5)}; }

/// Independent Cartesian expansion of the classical Hamiltonian.
double cartesian_form(const SecularState& s, const ScaledParams& p)
{
    const double sb = std::sin(p.beta), cb = std::cos(p.beta);
    const Vec3& a = s.i1;
    const Vec3& b = s.i2;
    double h = -1.0 + p.sg * (a.z() + b.z()) - 3.0 * p.sf * (sb * (a.x() - b.x()) + cb * (a.z() - b.z()));
    h += p.sg * p.sg / 8.0 *
         (3.0 - 4.0 * (a.z() * a.z() + b.z() * b.z() - a.z() * b.z()) - 8.0 * a.x() * b.x() - 8.0 * a.y() * b.y());
    h -= p.sf * p.sf / 8.0 *
         (17.0 - 12.0 * sb * sb * (a.x() * a.x() + b.x() * b.x()) - 12.0 * cb * cb * (a.z() * a.z() + b.z() * b.z()) +
          (48.0 - 60.0 * sb * sb) * a.x() * b.x() + 48.0 * a.y() * b.y() + (48.0 - 60.0 * cb * cb) * a.z() * b.z() -
          12.0 * sb * cb * (5.0 * (a.x() * b.z() + a.z() * b.x()) + 2.0 * (a.x() * a.z() + b.x() * b.z())));
    return h;
}

const ScaledParams kWeak{0.053, 0.0061, 0.0, -0.5};
const ScaledParams kStrong{0.74, 0.2, 60.0 * kPi / 180.0, -0.5};

} // namespace

TEST_CASE("Hamiltonian special values")
{
    std::mt19937_64 rng(1);
    for (int k = 0; k < 10; ++k) CHECK(scaled_hamiltonian(random_state(rng), ScaledParams{}) == -1.0);

    const double sg = 0.37;
    const SecularState up{Vec3(0, 0, 0.5), Vec3(0, 0, 0.5)};
    CHECK(scaled_hamiltonian(up, ScaledParams{sg, 0.0, 0.3}) == doctest::Approx(-1.0 + sg + sg * sg / 4));

    // cylindrical symmetry at parallel fields
    const ScaledParams par{0.4, 0.1, 0.0};
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.83, Vec3::UnitZ()).toRotationMatrix();
    for (int k = 0; k < 10; ++k) {
        const SecularState s = random_state(rng);
        CHECK(scaled_hamiltonian({rot * s.i1, rot * s.i2}, par) == doctest::Approx(scaled_hamiltonian(s, par)));
    }
}

TEST_CASE("re-derived Hamiltonian equals the Cartesian form on the shell")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const ScaledParams p{u(rng), u(rng), kPi / 2 * u(rng)};
        const SecularState s = random_state(rng);
        CHECK(scaled_hamiltonian(s, p) == doctest::Approx(cartesian_form(s, p)).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("gradient: analytic against central differences")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
        const ScaledParams p{u(rng), u(rng), kPi / 2 * u(rng)};
        const SecularState s = random_state(rng);
        const SecularGradient g = gradient(s, p);
        std::array<double, 6> x = s.to_array();
        for (std::size_t c = 0; c < 6; ++c) {
            std::array<double, 6> xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            const double fd = (scaled_hamiltonian(SecularState::from_array(xp), p) -
                               scaled_hamiltonian(SecularState::from_array(xm), p)) / (2 * h);
            const double an = c < 3 ? g.g1(static_cast<Eigen::Index>(c)) : g.g2(static_cast<Eigen::Index>(c - 3));
            CHECK(std::abs(an - fd) < 1e-8);
        }
    }
}

TEST_CASE("gradient limits")
{
    std::mt19937_64 rng(4);
    const SecularState s = random_state(rng);
    const SecularGradient zero = gradient(s, ScaledParams{});
    CHECK(zero.g1.norm() == 0.0);
    CHECK(zero.g2.norm() == 0.0);

    ScaledParams lin{0.3, 0.0, 0.2};
    lin.linear_only = true;
    const SecularGradient g = gradient(s, lin);
    CHECK((g.g1 - Vec3(0, 0, 0.3)).norm() < 1e-15);
    CHECK((g.g2 - Vec3(0, 0, 0.3)).norm() < 1e-15);
}

TEST_CASE("conservation along strongly chaotic trajectories")
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 3; ++k) {
        const SecularState s = random_state(rng);
        const Trajectory t = integrate(s, kStrong, 1000.0);
        CHECK(t.max_norm_drift < 1e-10 * 1000.0);
        CHECK(t.max_energy_drift < 1e-8 * 1000.0);
        CHECK(t.max_norm_drift < 1e-10);
        CHECK(t.max_energy_drift < 1e-8);
        CHECK(t.times.back() == 1000.0);
        CHECK(t.times.size() == 1001);
    }
}

TEST_CASE("L_z conservation with cylindrical symmetry")
{
    std::mt19937_64 rng(6);
    for (const ScaledParams& p : {ScaledParams{0.74, 0.0, 0.9}, ScaledParams{0.74, 0.2, 0.0}}) {
        const SecularState s = random_state(rng);
        const double lz = s.i1.z() + s.i2.z();
        const Trajectory t = integrate(s, p, 1e4, IntegratorOptions{1e-13, 1e-13, 1e-3, 1e-12, 10.0, false});
        double drift = 0.0;
        for (const SecularState& x : t.states) drift = std::max(drift, std::abs(x.i1.z() + x.i2.z() - lz));
        CHECK(drift < 1e-10);
    }
}

TEST_CASE("pure precession")
{
    ScaledParams lin{0.5, 0.1, 0.7};
    lin.linear_only = true;
    const SecularState s{Vec3(0.5, 0, 0), Vec3(0, 0.5, 0)};
    const double t_end = 3.0;
    const Trajectory t = integrate(s, lin, t_end);
    const Vec3 w1 = lin.omega1();
    const Vec3 w2 = lin.omega2();
    // dI/dt = w x I is a rotation by |w| t about w
    const Vec3 e1 = Eigen::AngleAxisd(w1.norm() * t_end, w1.normalized()) * s.i1;
    const Vec3 e2 = Eigen::AngleAxisd(w2.norm() * t_end, w2.normalized()) * s.i2;
    CHECK((t.states.back().i1 - e1).norm() < 1e-11);
    CHECK((t.states.back().i2 - e2).norm() < 1e-11);
}

TEST_CASE("time reversal")
{
    std::mt19937_64 rng(7);
    const SecularState s = random_state(rng);
    const SecularState fwd = integrate(s, kStrong, 200.0).states.back();
    const SecularState back = integrate(fwd, kStrong, -200.0).states.back();
    CHECK((back.i1 - s.i1).norm() < 1e-6);
    CHECK((back.i2 - s.i2).norm() < 1e-6);
}

TEST_CASE("integrator options: step underflow is reported")
{
    IntegratorOptions o;
    o.min_step = 10.0;  // any real step is below this
    std::mt19937_64 rng(8);
    CHECK_THROWS_AS(integrate(random_state(rng), kStrong, 100.0, o), NumericalError);
}

TEST_CASE("renormalized mode keeps the norms exact")
{
    IntegratorOptions o;
    o.renormalize = true;
    o.abs_tol = o.rel_tol = 1e-8;
    std::mt19937_64 rng(9);
    const Trajectory t = integrate(random_state(rng), kStrong, 200.0, o);
    for (const SecularState& s : t.states) {
        CHECK(s.i1.norm() == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(s.i2.norm() == doctest::Approx(0.5).epsilon(1e-7));
    }
}

TEST_CASE("frames and action-angle variables")
{
    const SecularFrames f = secular_frames(kStrong);
    for (const FrameAxes* a : {&f.first, &f.second}) {
        CHECK(a->e1.norm() == doctest::Approx(1.0));
        CHECK(a->e2.norm() == doctest::Approx(1.0));
        CHECK(std::abs(a->e1.dot(a->e3)) < 1e-15);
        CHECK((a->e1.cross(a->e2) - a->e3).norm() < 1e-15);
        CHECK(std::abs(a->e1.y()) < 1e-15);
    }
    CHECK((f.first.e3 - kStrong.omega1().normalized()).norm() < 1e-15);

    const ActionAngle pole = action_angle({0.5 * f.first.e3, 0.5 * f.second.e1}, f);
    CHECK(pole.j1z == doctest::Approx(0.5));
    CHECK(pole.phi1 == 0.0);
    CHECK(pole.j2z == doctest::Approx(0.0).scale(1.0));
    CHECK(pole.phi2 == doctest::Approx(0.0).scale(1.0));

    std::mt19937_64 rng(10);
    for (int k = 0; k < 50; ++k) {
        const SecularState s = random_state(rng);
        const SecularState r = state_from_action_angle(action_angle(s, f), f);
        CHECK((r.i1 - s.i1).norm() < 1e-14);
        CHECK((r.i2 - s.i2).norm() < 1e-14);
    }

    // gamma = 3 n f at parallel fields: omega1 = sg - 3 sf vanishes
    CHECK_THROWS_AS(secular_frames(ScaledParams{0.75, 0.25, 0.0}), DegenerateFrame);
    CHECK_THROWS_AS(frame_for(Vec3::Zero()), DegenerateFrame);
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS((ScaledParams{-0.1, 0.0, 0.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((ScaledParams{0.1, 0.1, 2.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS(integrate(SecularState{}, ScaledParams{0.1, -1.0, 0.0}, 1.0), InvalidArgument);
}

TEST_CASE("section roots lie on the energy shell")
{
    for (const ScaledParams& p : {kWeak, kStrong}) {
        const SecularFrames f = secular_frames(p);
        for (const SectionSeed& seed : seed_grid(5, 5)) {
            const std::vector<double> roots = section_roots(p, f, seed);
            CHECK(std::is_sorted(roots.begin(), roots.end()));
            for (double j2 : roots) {
                CHECK(std::abs(j2) <= 0.5);
                const SecularState s = state_from_action_angle({seed.j1z, seed.phi1, j2, 0.0}, f);
                CHECK(scaled_hamiltonian(s, p) == doctest::Approx(p.target_energy()).epsilon(1e-12));
            }
        }
    }
    // far below the manifold: no admissible root
    const ScaledParams low{0.053, 0.0061, 0.0, -5.0};
    CHECK(section_roots(low, secular_frames(low), SectionSeed{0.1, 0.2}).empty());
}

TEST_CASE("surface of section: crossings, energies, skipped seeds")
{
    PsosOptions o;
    o.t_end = 300.0;
    o.threads = 1;
    const PsosResult r = psos(kStrong, seed_grid(4, 4), o);
    REQUIRE(r.seeds.size() == 16);
    const SecularFrames f = secular_frames(kStrong);
    for (const SeedResult& s : r.seeds) {
        CHECK(s.skipped.empty());
        CHECK(s.diagnostic.empty());
        for (const SectionTrajectory& tr : s.branches) {
            CHECK(tr.points.size() > 5);
            CHECK(tr.max_energy_error < 1e-8);
            double last_t = -1.0;
            for (const SectionPoint& pt : tr.points) {
                const ActionAngle aa = action_angle(pt.state, f);
                CHECK(std::abs(aa.phi2) < 1e-10);
                CHECK(pt.phi1 >= -kPi);
                CHECK(pt.phi1 < kPi);
                CHECK(pt.t > last_t);
                last_t = pt.t;
                // upward crossing: dphi2/dt = d(I2.e2)/dt / (I2.e1) > 0
                const SecularState v = secular_rhs(pt.state, kStrong);
                CHECK(v.i2.dot(f.second.e2) > 0.0);
            }
        }
    }

    const ScaledParams low{0.053, 0.0061, 0.0, -5.0};
    const PsosResult none = psos(low, seed_grid(2, 2), o);
    for (const SeedResult& s : none.seeds) {
        CHECK_FALSE(s.skipped.empty());
        CHECK(s.branches.empty());
    }
    const PsosSummary sum = summarize(none);
    CHECK(sum.skipped == 4);
    CHECK(sum.trajectories == 0);

    CHECK_THROWS_AS(psos(ScaledParams{0.75, 0.25, 0.0}, seed_grid(2, 2), o), DegenerateFrame);
}

TEST_CASE("section structure changes between 58, 60 and 62 degrees")
{
    PsosOptions o;
    o.t_end = 500.0;
    std::vector<std::vector<int>> occupancy;
    for (double deg : {58.0, 60.0, 62.0}) {
        const PsosResult r = psos(ScaledParams{0.74, 0.2, deg * kPi / 180, -0.5}, seed_grid(8, 8), o);
        occupancy.push_back(summarize(r).occupancy);
    }
    CHECK(occupancy[0] != occupancy[1]);
    CHECK(occupancy[1] != occupancy[2]);
    CHECK(occupancy[0] != occupancy[2]);
}

TEST_CASE("shell partner")
{
    std::mt19937_64 rng(12);
    const SecularState s = random_state(rng);
    const SecularState q = shell_partner(s, kStrong, 1e-8, 3);
    const double d = std::sqrt((q.i1 - s.i1).squaredNorm() + (q.i2 - s.i2).squaredNorm());
    CHECK(d == doctest::Approx(1e-8).epsilon(1e-10));
    CHECK(std::abs(q.i1.norm() - 0.5) < 1e-15);
    CHECK(std::abs(q.i2.norm() - 0.5) < 1e-15);
    CHECK(std::abs(scaled_hamiltonian(q, kStrong) - scaled_hamiltonian(s, kStrong)) < 1e-15);
}

TEST_CASE("Lyapunov exponents: integrable, regular and chaotic cases")
{
    const auto exponents = [](const ScaledParams& p) {
        const SecularFrames f = secular_frames(p);
        std::vector<double> out;
        for (const SectionSeed& seed : seed_grid(3, 3)) {
            const std::vector<double> roots = section_roots(p, f, seed);
            if (roots.empty()) continue;
            const SecularState s = state_from_action_angle({seed.j1z, seed.phi1, roots.front(), 0.0}, f);
            out.push_back(chaos_indicator(s, shell_partner(s, p, 1e-8, 7), p, 2000.0, 10.0).exponent);
        }
        return out;
    };

    ScaledParams lin = kStrong;
    lin.linear_only = true;
    for (double e : exponents(lin)) CHECK(std::abs(e) < 1e-3);

    double baseline = 0.0;
    for (double deg : {0.0, 45.0}) {
        ScaledParams p = kWeak;
        p.beta = deg * kPi / 180;
        for (double e : exponents(p)) {
            CHECK(e < 5e-3);
            baseline = std::max(baseline, std::abs(e));
        }
    }
    double largest = 0.0;
    for (double e : exponents(kStrong)) largest = std::max(largest, e);
    CHECK(largest > 10.0 * baseline);

    CHECK_THROWS_AS(chaos_indicator(SecularState{}, SecularState{}, kStrong, 10.0, 20.0), InvalidArgument);
}
