#include "crossfield/surface_of_section.hpp"

#include "crossfield/errors.hpp"
#include "crossfield/parallel.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crossfield {

namespace {

constexpr double kPi = std::numbers::pi;

SecularState seed_state(const SecularFrames& frames, const SectionSeed& seed, double theta)
{
    const double perp = std::sqrt(std::max(0.0, kSecularNorm * kSecularNorm - seed.j1z * seed.j1z));
    const FrameAxes& f1 = frames.first;
    const FrameAxes& f2 = frames.second;
    SecularState s;
    s.i1 = seed.j1z * f1.e3 + perp * (std::cos(seed.phi1) * f1.e1 + std::sin(seed.phi1) * f1.e2);
    s.i2 = kSecularNorm * (std::cos(theta) * f2.e3 + std::sin(theta) * f2.e1);
    return s;
}

double wrap_angle(double phi)
{
    // atan2 returns (-pi, pi]; the section convention is [-pi, pi).
    return phi >= kPi ? phi - 2 * kPi : phi;
}

SectionPoint make_point(const SecularState& s, const SecularFrames& frames, double t, int branch)
{
    const ActionAngle aa = action_angle(s, frames);
    return {wrap_angle(aa.phi1), aa.j1z, t, branch, s};
}

SectionTrajectory run_branch(const ScaledParams& p, const SecularFrames& frames, const SecularState& start,
                             int branch, double j2z0, const PsosOptions& opt)
{
    const double target = p.target_energy();
    const Vec3& e1 = frames.second.e1;
    const Vec3& e2 = frames.second.e2;

    SectionTrajectory out;
    out.branch = branch;
    out.j2z0 = j2z0;
    out.points.push_back(make_point(start, frames, 0.0, branch));

    SecularIntegrator integ(start, p, opt.integrator);
    double y_prev = start.i2.dot(e2);
    double x_prev = start.i2.dot(e1);
    while (integ.time() < opt.t_end) {
        integ.step();
        const SecularState s = integ.state();
        const double y = s.i2.dot(e2);
        const double x = s.i2.dot(e1);
        out.max_norm_drift = std::max({out.max_norm_drift, std::abs(s.i1.norm() - kSecularNorm),
                                       std::abs(s.i2.norm() - kSecularNorm)});
        if (y_prev < 0.0 && y >= 0.0 && (x > 0.0 || x_prev > 0.0)) {
            const double t0 = integ.previous_time();
            const double t1 = integ.time();
            const auto phi2_at = [&](double t) { return integ.interpolate(t).i2.dot(e2); };
            double tc = t1;
            if (y != 0.0) {
                std::uintmax_t iters = 200;
                const auto tol = [&](double a, double b) {
                    if (std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(b))) return true;
                    const double mid = 0.5 * (a + b);
                    return std::abs(phi2_at(mid)) < 0.25 * opt.crossing_tol * kSecularNorm;
                };
                const auto r = boost::math::tools::toms748_solve(phi2_at, t0, t1, y_prev, y, tol, iters);
                tc = 0.5 * (r.first + r.second);
            }
            const SecularState sc = tc == t1 ? s : integ.interpolate(tc);
            if (sc.i2.dot(e1) > 0.0 && tc <= opt.t_end) {
                out.points.push_back(make_point(sc, frames, tc, branch));
            }
        }
        y_prev = y;
        x_prev = x;
    }

    double lo = out.points.front().j1z;
    double hi = lo;
    for (const SectionPoint& pt : out.points) {
        lo = std::min(lo, pt.j1z);
        hi = std::max(hi, pt.j1z);
        out.max_energy_error = std::max(out.max_energy_error, std::abs(scaled_hamiltonian(pt.state, p) - target));
    }
    out.j1z_spread = hi - lo;
    return out;
}

} // namespace

std::vector<SectionSeed> seed_grid(std::size_t n_j1z, std::size_t n_phi1)
{
    if (n_j1z == 0 || n_phi1 == 0) throw InvalidArgument("seed_grid: both dimensions must be positive");
    std::vector<SectionSeed> seeds;
    seeds.reserve(n_j1z * n_phi1);
    for (std::size_t i = 0; i < n_j1z; ++i) {
        for (std::size_t k = 0; k < n_phi1; ++k) {
            const double j = -0.5 + (static_cast<double>(i) + 0.5) / static_cast<double>(n_j1z);
            const double phi = -kPi + (static_cast<double>(k) + 0.5) * 2 * kPi / static_cast<double>(n_phi1);
            seeds.push_back({j, phi});
        }
    }
    return seeds;
}

std::vector<double> section_roots(const ScaledParams& p, const SecularFrames& frames, const SectionSeed& seed,
                                  int grid)
{
    if (grid < 8) throw InvalidArgument("section_roots: grid too coarse");
    if (std::abs(seed.j1z) > kSecularNorm) throw InvalidArgument("section_roots: |J1z| exceeds 1/2");
    const double target = p.target_energy();
    const auto g = [&](double theta) { return scaled_hamiltonian(seed_state(frames, seed, theta), p) - target; };

    std::vector<double> thetas;
    double a = 0.0;
    double ga = g(a);
    if (ga == 0.0) thetas.push_back(a);
    for (int k = 1; k <= grid; ++k) {
        const double b = kPi * k / grid;
        const double gb = g(b);
        if (gb == 0.0) {
            thetas.push_back(b);
        } else if (ga != 0.0 && (ga < 0.0) != (gb < 0.0)) {
            std::uintmax_t iters = 200;
            const auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb,
                                                             boost::math::tools::eps_tolerance<double>(52), iters);
            thetas.push_back(0.5 * (r.first + r.second));
        }
        a = b;
        ga = gb;
    }
    std::vector<double> roots;
    for (double t : thetas) roots.push_back(kSecularNorm * std::cos(t));
    std::sort(roots.begin(), roots.end());
    return roots;
}

PsosResult psos(const ScaledParams& p, const std::vector<SectionSeed>& seeds, const PsosOptions& options)
{
    p.validate();
    if (!(options.t_end > 0.0)) throw InvalidArgument("psos: t_end must be positive");
    const SecularFrames frames = secular_frames(p);

    PsosResult result{p, options, std::vector<SeedResult>(seeds.size())};
    parallel_for(seeds.size(), options.threads, [&](std::size_t i) {
        SeedResult& r = result.seeds[i];
        r.seed_id = i;
        r.seed = seeds[i];
        std::vector<double> roots;
        try {
            roots = section_roots(p, frames, seeds[i], options.root_grid);
        } catch (const std::exception& e) {
            r.skipped = std::string("root search failed: ") + e.what();
            return;
        }
        if (roots.empty()) {
            r.skipped = "no J2z in [-1/2, 1/2] reaches the energy shell";
            return;
        }
        for (std::size_t b = 0; b < roots.size(); ++b) {
            const double theta = std::acos(std::clamp(roots[b] / kSecularNorm, -1.0, 1.0));
            try {
                r.branches.push_back(run_branch(p, frames, seed_state(frames, seeds[i], theta),
                                                static_cast<int>(b), roots[b], options));
            } catch (const NumericalError& e) {
                r.diagnostic += "branch " + std::to_string(b) + ": " + e.what() + "; ";
            }
        }
    });
    return result;
}

PsosSummary summarize(const PsosResult& result, double chaos_threshold, int cells)
{
    if (cells <= 0) throw InvalidArgument("summarize: cells must be positive");
    PsosSummary s;
    s.cells = cells;
    s.seeds = result.seeds.size();
    s.occupancy.assign(static_cast<std::size_t>(cells) * cells, 0);
    std::vector<char> chaotic_hit(s.occupancy.size(), 0);

    const auto cell_of = [cells](const SectionPoint& pt) {
        const int row = std::clamp(static_cast<int>(std::floor((pt.j1z + 0.5) * cells)), 0, cells - 1);
        const int col = std::clamp(static_cast<int>(std::floor((pt.phi1 + kPi) / (2 * kPi) * cells)), 0, cells - 1);
        return static_cast<std::size_t>(row) * cells + col;
    };

    for (const SeedResult& r : result.seeds) {
        if (!r.skipped.empty()) ++s.skipped;
        bool seed_chaotic = false;
        for (const SectionTrajectory& tr : r.branches) {
            ++s.trajectories;
            s.max_spread = std::max(s.max_spread, tr.j1z_spread);
            s.max_energy_error = std::max(s.max_energy_error, tr.max_energy_error);
            const bool chaotic = tr.j1z_spread > chaos_threshold;
            if (chaotic) {
                ++s.chaotic_trajectories;
                seed_chaotic = true;
            }
            for (const SectionPoint& pt : tr.points) {
                const std::size_t c = cell_of(pt);
                ++s.occupancy[c];
                if (chaotic) chaotic_hit[c] = 1;
            }
        }
        if (seed_chaotic) ++s.chaotic_seeds;
    }
    s.chaotic_fraction = s.seeds == 0 ? 0.0 : static_cast<double>(s.chaotic_seeds) / static_cast<double>(s.seeds);
    s.occupied_cells = static_cast<std::size_t>(std::count_if(s.occupancy.begin(), s.occupancy.end(),
                                                               [](int c) { return c > 0; }));
    s.chaotic_occupied_cells = static_cast<std::size_t>(std::count(chaotic_hit.begin(), chaotic_hit.end(), 1));
    return s;
}

} // namespace crossfield
