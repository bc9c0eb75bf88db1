#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace crossfield {

using Vec3 = Eigen::Vector3d;

/// Scaled parameters of the secular motion: n^3 gamma, n^4 f, beta, n^2 E.
struct ScaledParams {
    double sg = 0.0;
    double sf = 0.0;
    double beta = 0.0;
    double se = -0.5;
    /// Drops the quadratic field terms, leaving pure precession about the
    /// omega vectors. Used to isolate the integrable limit.
    bool linear_only = false;

    void validate() const;
    /// Energy shell of the scaled Hamiltonian, 2 n^2 E.
    double target_energy() const { return 2.0 * se; }
    /// Unit vector of the electric field, (sin beta, 0, cos beta).
    Vec3 field_axis() const;
    /// Scaled precession vectors sg z -/+ 3 sf f_hat.
    Vec3 omega1() const;
    Vec3 omega2() const;
};

/// I1, I2 scaled by n, so both norms are 1/2 classically.
struct SecularState {
    Vec3 i1 = Vec3::Zero();
    Vec3 i2 = Vec3::Zero();

    std::array<double, 6> to_array() const;
    static SecularState from_array(const std::array<double, 6>& x);
};

inline constexpr double kSecularNorm = 0.5;

/// Scaled intramanifold Hamiltonian 2 n^2 H_n, obtained from the manifold
/// operator identities by replacing I1, I2 with classical vectors:
///
///   -1 + omega1.I1 + omega2.I2
///      + (sg^2/8) (1 + L_z^2 + 4 A^2 - 5 A_z^2)
///      - (sf^2/8) (5 + 24 L^2 - 21 L_f^2 + 9 A_f^2),   L = I1 + I2, A = I1 - I2.
///
/// On the shell |I1| = |I2| = 1/2 this agrees term by term with the expanded
/// Cartesian form, whose electric cross term reads I1x I1z + I2x I2z.
double scaled_hamiltonian(const SecularState& state, const ScaledParams& p);

struct SecularGradient {
    Vec3 g1;
    Vec3 g2;
};

/// Analytic partial derivatives of scaled_hamiltonian.
SecularGradient gradient(const SecularState& state, const ScaledParams& p);

/// Right-hand side dI_i/dt = grad_i H x I_i.
SecularState secular_rhs(const SecularState& state, const ScaledParams& p);

struct IntegratorOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-13;
    double initial_step = 1e-3;
    double min_step = 1e-12;       ///< below this the step size counts as underflow
    double sample_interval = 1.0;  ///< spacing of stored trajectory samples
    bool renormalize = false;      ///< rescale |I1|, |I2| to 1/2 after each step (off: drift stays observable)
};

/// Adaptive Dormand-Prince 5(4) stepper with dense output over the secular
/// flow. Negative durations integrate backwards in time.
class SecularIntegrator {
public:
    SecularIntegrator(const SecularState& start, const ScaledParams& p, const IntegratorOptions& options,
                      double direction = 1.0);
    ~SecularIntegrator();
    SecularIntegrator(SecularIntegrator&&) noexcept;
    SecularIntegrator& operator=(SecularIntegrator&&) noexcept;

    /// Advances one accepted step. Throws NumericalError on step-size underflow.
    void step();
    double time() const;           ///< physical time at the end of the last step
    double previous_time() const;  ///< physical time at the start of the last step
    SecularState state() const;
    /// Dense-output state at a physical time inside the last step.
    SecularState interpolate(double t) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SecularState> states;
    double max_norm_drift = 0.0;     ///< max | |I_i| - |I_i(0)| | over accepted steps
    double max_energy_drift = 0.0;   ///< max |H - H0| / max(|H0|, 1e-300)
    std::size_t steps = 0;
};

/// Integrates from t = 0 to t_end (negative integrates backwards). Samples are
/// stored every options.sample_interval plus the endpoint.
Trajectory integrate(const SecularState& start, const ScaledParams& p, double t_end,
                     const IntegratorOptions& options = {});

/// Orthonormal triad attached to one omega vector: e3 along omega,
/// e1 = normalize(y x e3), e2 = e3 x e1.
struct FrameAxes {
    Vec3 e1;
    Vec3 e2;
    Vec3 e3;
};

/// Throws DegenerateFrame when omega vanishes (gamma = 3 n f at parallel fields).
FrameAxes frame_for(const Vec3& omega);

struct SecularFrames {
    FrameAxes first;
    FrameAxes second;
};

SecularFrames secular_frames(const ScaledParams& p);

struct ActionAngle {
    double j1z = 0.0;
    double phi1 = 0.0;
    double j2z = 0.0;
    double phi2 = 0.0;
};

/// Projections on the omega axes and azimuths about them; azimuth 0 at the poles.
ActionAngle action_angle(const SecularState& state, const SecularFrames& frames);

/// Inverse of action_angle on the shell |I_i| = 1/2.
SecularState state_from_action_angle(const ActionAngle& aa, const SecularFrames& frames);

struct LyapunovEstimate {
    double exponent = 0.0;
    std::vector<double> history;   ///< running estimate after each renormalization
    double total_time = 0.0;
};

/// A neighbour at distance `separation` whose displacement is tangent to both
/// norm spheres and to the energy shell.
SecularState shell_partner(const SecularState& state, const ScaledParams& p, double separation,
                           unsigned seed = 1);

/// Benettin estimate of the largest Lyapunov exponent from a reference orbit
/// and a nearby partner, renormalizing the separation every `renorm_interval`.
LyapunovEstimate chaos_indicator(const SecularState& reference, const SecularState& partner, const ScaledParams& p,
                                 double total_time, double renorm_interval,
                                 const IntegratorOptions& options = {});

} // namespace crossfield
