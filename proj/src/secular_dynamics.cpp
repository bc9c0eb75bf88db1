#include "crossfield/secular_dynamics.hpp"

#include "crossfield/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace crossfield {

namespace odeint = boost::numeric::odeint;

namespace {

using OdeState = std::array<double, 6>;
using Stepper = odeint::result_of::make_dense_output<odeint::runge_kutta_dopri5<OdeState>>::type;

const Vec3 kAxisY(0.0, 1.0, 0.0);
const Vec3 kAxisZ(0.0, 0.0, 1.0);

std::string describe(const SecularState& s)
{
    std::ostringstream os;
    os.precision(17);
    os << "I1=(" << s.i1.x() << ", " << s.i1.y() << ", " << s.i1.z() << "), I2=(" << s.i2.x() << ", " << s.i2.y()
       << ", " << s.i2.z() << ")";
    return os.str();
}

} // namespace

void ScaledParams::validate() const
{
    if (!(sg >= 0.0) || !(sf >= 0.0)) throw InvalidArgument("scaled field strengths must be >= 0");
    if (!(beta >= 0.0) || beta > std::numbers::pi / 2 + 1e-12)
        throw InvalidArgument("beta must lie in [0, pi/2]");
    if (!std::isfinite(se)) throw InvalidArgument("scaled energy must be finite");
}

Vec3 ScaledParams::field_axis() const
{
    if (beta == std::numbers::pi / 2) return Vec3(1.0, 0.0, 0.0);
    return Vec3(std::sin(beta), 0.0, std::cos(beta));
}

Vec3 ScaledParams::omega1() const { return sg * kAxisZ - 3.0 * sf * field_axis(); }
Vec3 ScaledParams::omega2() const { return sg * kAxisZ + 3.0 * sf * field_axis(); }

std::array<double, 6> SecularState::to_array() const
{
    return {i1.x(), i1.y(), i1.z(), i2.x(), i2.y(), i2.z()};
}

SecularState SecularState::from_array(const std::array<double, 6>& x)
{
    return {Vec3(x[0], x[1], x[2]), Vec3(x[3], x[4], x[5])};
}

double scaled_hamiltonian(const SecularState& s, const ScaledParams& p)
{
    double h = -1.0 + p.omega1().dot(s.i1) + p.omega2().dot(s.i2);
    if (p.linear_only) return h;

    const Vec3 l = s.i1 + s.i2;
    const Vec3 a = s.i1 - s.i2;
    const Vec3 fh = p.field_axis();
    const double lf = fh.dot(l);
    const double af = fh.dot(a);
    h += p.sg * p.sg / 8.0 * (1.0 + l.z() * l.z() + 4.0 * a.squaredNorm() - 5.0 * a.z() * a.z());
    h -= p.sf * p.sf / 8.0 * (5.0 + 24.0 * l.squaredNorm() - 21.0 * lf * lf + 9.0 * af * af);
    return h;
}

SecularGradient gradient(const SecularState& s, const ScaledParams& p)
{
    SecularGradient g{p.omega1(), p.omega2()};
    if (p.linear_only) return g;

    const Vec3 l = s.i1 + s.i2;
    const Vec3 a = s.i1 - s.i2;
    const Vec3 fh = p.field_axis();
    const double lf = fh.dot(l);
    const double af = fh.dot(a);

    const double cg = p.sg * p.sg / 8.0;
    const double cf = p.sf * p.sf / 8.0;
    // d/dI1 and d/dI2 of the quadratic forms; L and A enter as I1 +/- I2.
    const Vec3 d_l = cg * 2.0 * l.z() * kAxisZ - cf * (48.0 * l - 42.0 * lf * fh);
    const Vec3 d_a = cg * (8.0 * a - 10.0 * a.z() * kAxisZ) - cf * 18.0 * af * fh;
    g.g1 += d_l + d_a;
    g.g2 += d_l - d_a;
    return g;
}

SecularState secular_rhs(const SecularState& s, const ScaledParams& p)
{
    const SecularGradient g = gradient(s, p);
    return {g.g1.cross(s.i1), g.g2.cross(s.i2)};
}

struct SecularIntegrator::Impl {
    ScaledParams params;
    IntegratorOptions options;
    double direction;
    Stepper stepper;
    Stepper snapshot;  // dense output of the last step when renormalization rewinds the stepper

    void operator()(const OdeState& x, OdeState& dx, double) const
    {
        const SecularState d = secular_rhs(SecularState::from_array(x), params);
        const OdeState raw = d.to_array();
        for (std::size_t i = 0; i < 6; ++i) dx[i] = direction * raw[i];
    }
};

SecularIntegrator::SecularIntegrator(const SecularState& start, const ScaledParams& p,
                                     const IntegratorOptions& options, double direction)
    : impl_(std::make_unique<Impl>(Impl{p, options, direction >= 0.0 ? 1.0 : -1.0,
                                        odeint::make_dense_output(options.abs_tol, options.rel_tol,
                                                                  odeint::runge_kutta_dopri5<OdeState>()),
                                        {}}))
{
    impl_->stepper.initialize(start.to_array(), 0.0, options.initial_step);
}

SecularIntegrator::~SecularIntegrator() = default;
SecularIntegrator::SecularIntegrator(SecularIntegrator&&) noexcept = default;
SecularIntegrator& SecularIntegrator::operator=(SecularIntegrator&&) noexcept = default;

void SecularIntegrator::step()
{
    Impl& im = *impl_;
    try {
        im.stepper.do_step(std::cref(im));
    } catch (const odeint::odeint_error& e) {
        throw NumericalError(std::string("secular integration failed: ") + e.what() + " at " +
                             describe(SecularState::from_array(im.stepper.current_state())));
    }
    if (std::abs(im.stepper.current_time_step()) < im.options.min_step)
        throw NumericalError("secular integration: step size underflow at t=" +
                             std::to_string(im.direction * im.stepper.current_time()) + ", " +
                             describe(SecularState::from_array(im.stepper.current_state())));
    if (im.options.renormalize) {
        im.snapshot = im.stepper;
        SecularState s = SecularState::from_array(im.stepper.current_state());
        s.i1 *= kSecularNorm / s.i1.norm();
        s.i2 *= kSecularNorm / s.i2.norm();
        im.stepper.initialize(s.to_array(), im.stepper.current_time(), im.stepper.current_time_step());
    }
}

double SecularIntegrator::time() const { return impl_->direction * impl_->stepper.current_time(); }

double SecularIntegrator::previous_time() const
{
    const Stepper& s = impl_->options.renormalize ? impl_->snapshot : impl_->stepper;
    return impl_->direction * s.previous_time();
}

SecularState SecularIntegrator::state() const { return SecularState::from_array(impl_->stepper.current_state()); }

SecularState SecularIntegrator::interpolate(double t) const
{
    const Stepper& s = impl_->options.renormalize ? impl_->snapshot : impl_->stepper;
    OdeState x{};
    s.calc_state(impl_->direction * t, x);
    return SecularState::from_array(x);
}

Trajectory integrate(const SecularState& start, const ScaledParams& p, double t_end, const IntegratorOptions& options)
{
    p.validate();
    const double direction = t_end >= 0.0 ? 1.0 : -1.0;
    const double duration = std::abs(t_end);
    const double n1 = start.i1.norm();
    const double n2 = start.i2.norm();
    const double h0 = scaled_hamiltonian(start, p);
    const double h_scale = std::max(std::abs(h0), 1e-300);

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(start);
    if (duration == 0.0) return traj;

    SecularIntegrator integrator(start, p, options, direction);
    double next_sample = options.sample_interval;
    while (true) {
        integrator.step();
        ++traj.steps;
        const double reached = std::abs(integrator.time());
        const double stop = std::min(reached, duration);
        while (next_sample <= stop) {
            traj.times.push_back(direction * next_sample);
            traj.states.push_back(integrator.interpolate(direction * next_sample));
            next_sample += options.sample_interval;
        }

        const SecularState s = integrator.state();
        traj.max_norm_drift = std::max({traj.max_norm_drift, std::abs(s.i1.norm() - n1), std::abs(s.i2.norm() - n2)});
        traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(scaled_hamiltonian(s, p) - h0) / h_scale);

        if (reached >= duration) {
            if (traj.times.back() != direction * duration) {
                traj.times.push_back(direction * duration);
                traj.states.push_back(integrator.interpolate(direction * duration));
            }
            break;
        }
    }
    return traj;
}

FrameAxes frame_for(const Vec3& omega)
{
    const double norm = omega.norm();
    if (norm == 0.0)
        throw DegenerateFrame("omega vector vanishes (gamma = 3 n f with parallel fields); "
                              "the action-angle frame is undefined");
    FrameAxes f;
    f.e3 = omega / norm;
    f.e1 = kAxisY.cross(f.e3).normalized();
    f.e2 = f.e3.cross(f.e1);
    return f;
}

SecularFrames secular_frames(const ScaledParams& p) { return {frame_for(p.omega1()), frame_for(p.omega2())}; }

ActionAngle action_angle(const SecularState& s, const SecularFrames& frames)
{
    const auto one = [](const Vec3& v, const FrameAxes& f, double& jz, double& phi) {
        jz = v.dot(f.e3);
        const double x = v.dot(f.e1);
        const double y = v.dot(f.e2);
        phi = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
    };
    ActionAngle out;
    one(s.i1, frames.first, out.j1z, out.phi1);
    one(s.i2, frames.second, out.j2z, out.phi2);
    return out;
}

SecularState state_from_action_angle(const ActionAngle& aa, const SecularFrames& frames)
{
    const auto one = [](double jz, double phi, const FrameAxes& f) {
        const double perp = std::sqrt(std::max(0.0, kSecularNorm * kSecularNorm - jz * jz));
        return Vec3(jz * f.e3 + perp * (std::cos(phi) * f.e1 + std::sin(phi) * f.e2));
    };
    return {one(aa.j1z, aa.phi1, frames.first), one(aa.j2z, aa.phi2, frames.second)};
}

SecularState shell_partner(const SecularState& state, const ScaledParams& p, double separation, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::Matrix<double, 6, 1> delta;
    for (int i = 0; i < 6; ++i) delta(i) = normal(rng);

    // Constraint normals: the two norm spheres and the energy shell.
    Eigen::Matrix<double, 6, 3> normals = Eigen::Matrix<double, 6, 3>::Zero();
    normals.block<3, 1>(0, 0) = state.i1;
    normals.block<3, 1>(3, 1) = state.i2;
    const SecularGradient g = gradient(state, p);
    normals.block<3, 1>(0, 2) = g.g1;
    normals.block<3, 1>(3, 2) = g.g2;
    const Eigen::HouseholderQR<Eigen::Matrix<double, 6, 3>> qr(normals);
    const Eigen::Matrix<double, 6, 3> q = qr.householderQ() * Eigen::Matrix<double, 6, 3>::Identity();
    for (int sweep = 0; sweep < 2; ++sweep) delta -= q * (q.transpose() * delta);
    delta *= separation / delta.norm();

    return {state.i1 + delta.head<3>(), state.i2 + delta.tail<3>()};
}

LyapunovEstimate chaos_indicator(const SecularState& reference, const SecularState& partner, const ScaledParams& p,
                                 double total_time, double renorm_interval, const IntegratorOptions& options)
{
    if (!(renorm_interval > 0.0) || !(total_time >= renorm_interval))
        throw InvalidArgument("chaos_indicator: need 0 < renorm_interval <= total_time");

    const auto distance = [](const SecularState& a, const SecularState& b) {
        return std::sqrt((a.i1 - b.i1).squaredNorm() + (a.i2 - b.i2).squaredNorm());
    };
    const double d0 = distance(reference, partner);
    if (!(d0 > 0.0)) throw InvalidArgument("chaos_indicator: partner coincides with the reference orbit");

    IntegratorOptions opts = options;
    opts.sample_interval = renorm_interval;

    LyapunovEstimate out;
    SecularState x = reference;
    SecularState y = partner;
    double log_sum = 0.0;
    const auto intervals = static_cast<std::size_t>(std::floor(total_time / renorm_interval + 1e-9));
    for (std::size_t k = 0; k < intervals; ++k) {
        x = integrate(x, p, renorm_interval, opts).states.back();
        y = integrate(y, p, renorm_interval, opts).states.back();
        const double d = distance(x, y);
        log_sum += std::log(d / d0);
        y.i1 = x.i1 + (y.i1 - x.i1) * (d0 / d);
        y.i2 = x.i2 + (y.i2 - x.i2) * (d0 / d);
        out.total_time = static_cast<double>(k + 1) * renorm_interval;
        out.history.push_back(log_sum / out.total_time);
    }
    out.exponent = out.history.empty() ? 0.0 : out.history.back();
    return out;
}

} // namespace crossfield
