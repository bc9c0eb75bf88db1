#include "crossfield/spectral_statistics.hpp"

#include "crossfield/errors.hpp"
#include "crossfield/parallel.hpp"
#include "crossfield/perturbation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>

namespace crossfield {

namespace {

void check_q(double q)
{
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("Brody parameter must lie in [0, 1]");
}

std::vector<double> fitted_staircase(const std::vector<double>& e, int degree)
{
    const std::size_t m = e.size();
    const double lo = e.front();
    const double hi = e.back();
    const double mid = 0.5 * (lo + hi);
    const double half = hi > lo ? 0.5 * (hi - lo) : 1.0;

    Eigen::MatrixXd v(static_cast<Eigen::Index>(m), degree + 1);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const double x = (e[i] - mid) / half;
        double p = 1.0;
        for (int k = 0; k <= degree; ++k) {
            v(static_cast<Eigen::Index>(i), k) = p;
            p *= x;
        }
        rhs(static_cast<Eigen::Index>(i)) = static_cast<double>(i) + 0.5;
    }
    const Eigen::VectorXd c = v.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd fitted = v * c;
    return {fitted.data(), fitted.data() + fitted.size()};
}

void rescale_unit_mean(std::vector<double>& s)
{
    if (s.empty()) return;
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    if (!(mean > 0.0)) throw NumericalError("unfolding produced a non-positive mean spacing");
    for (double& x : s) x /= mean;
}

} // namespace

LevelSequence make_level_sequence(int n, std::vector<double> energies, const FieldParams& params)
{
    std::sort(energies.begin(), energies.end());
    std::vector<double> kept;
    kept.reserve(energies.size());
    for (double e : energies) {
        if (!kept.empty() && std::abs(e - kept.back()) <= 1e-13 * std::max(std::abs(e), std::abs(kept.back())))
            continue;
        kept.push_back(e);
    }
    return {n, std::move(kept), params};
}

LevelSequence window_levels(const LevelSequence& seq, double se_target, double sg)
{
    LevelSequence out{seq.n, {}, seq.params};
    const double n2 = static_cast<double>(seq.n) * seq.n;
    for (double e : seq.energies)
        if (std::abs(n2 * e - se_target) <= 0.1 * sg) out.energies.push_back(e);
    return out;
}

SpacingEnsemble unfold(const LevelSequence& seq, int degree)
{
    if (degree < 1) throw InvalidArgument("unfolding degree must be >= 1");
    if (seq.energies.size() < 10)
        throw InsufficientData("unfolding needs at least 10 levels, got " + std::to_string(seq.energies.size()));
    const std::vector<double> n_fit = fitted_staircase(seq.energies, degree);
    SpacingEnsemble out;
    out.spacings.resize(n_fit.size() - 1);
    for (std::size_t i = 0; i + 1 < n_fit.size(); ++i) out.spacings[i] = n_fit[i + 1] - n_fit[i];
    rescale_unit_mean(out.spacings);
    out.manifolds = {seq.n};
    out.unfolding = "staircase polynomial degree " + std::to_string(degree);
    return out;
}

SpacingEnsemble unfold_local(const LevelSequence& seq, int half_width)
{
    if (half_width < 1) throw InvalidArgument("local unfolding half width must be >= 1");
    const std::size_t m = seq.energies.size();
    if (m < 10) throw InsufficientData("unfolding needs at least 10 levels, got " + std::to_string(m));
    std::vector<double> raw(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) raw[i] = seq.energies[i + 1] - seq.energies[i];
    std::vector<double> prefix(raw.size() + 1, 0.0);
    std::partial_sum(raw.begin(), raw.end(), prefix.begin() + 1);

    const std::size_t width = std::min(raw.size(), 2 * static_cast<std::size_t>(half_width) + 1);
    SpacingEnsemble out;
    out.spacings.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::size_t lo = std::min(i - std::min(i, static_cast<std::size_t>(half_width)), raw.size() - width);
        const double local = (prefix[lo + width] - prefix[lo]) / static_cast<double>(width);
        out.spacings[i] = raw[i] / local;
    }
    rescale_unit_mean(out.spacings);
    out.manifolds = {seq.n};
    out.unfolding = "local mean over " + std::to_string(width) + " spacings";
    return out;
}

SpacingEnsemble pool(std::span<const SpacingEnsemble> parts)
{
    SpacingEnsemble out;
    for (const SpacingEnsemble& p : parts) {
        out.spacings.insert(out.spacings.end(), p.spacings.begin(), p.spacings.end());
        out.manifolds.insert(out.manifolds.end(), p.manifolds.begin(), p.manifolds.end());
        if (out.window.empty()) out.window = p.window;
        if (out.unfolding.empty()) out.unfolding = p.unfolding;
    }
    return out;
}

double brody_alpha(double q)
{
    check_q(q);
    return std::pow(std::tgamma((q + 2.0) / (q + 1.0)), q + 1.0);
}

double pdf(SpacingFamily family, double s, double q)
{
    if (!(s >= 0.0)) throw InvalidArgument("spacing must be >= 0");
    switch (family) {
    case SpacingFamily::Poisson:
        return std::exp(-s);
    case SpacingFamily::Wigner:
        return std::numbers::pi * s / 2.0 * std::exp(-std::numbers::pi / 4.0 * s * s);
    case SpacingFamily::Brody: {
        const double a = brody_alpha(q);
        return (q + 1.0) * a * std::pow(s, q) * std::exp(-a * std::pow(s, q + 1.0));
    }
    }
    throw InvalidArgument("unknown spacing family");
}

double brody_cdf(double s, double q)
{
    if (!(s >= 0.0)) throw InvalidArgument("spacing must be >= 0");
    return -std::expm1(-brody_alpha(q) * std::pow(s, q + 1.0));
}

double brody_quantile(double u, double q)
{
    if (!(u >= 0.0 && u < 1.0)) throw InvalidArgument("brody_quantile: u must lie in [0, 1)");
    return std::pow(-std::log1p(-u) / brody_alpha(q), 1.0 / (q + 1.0));
}

double brody_log_likelihood(std::span<const double> spacings, double q)
{
    const double a = brody_alpha(q);
    const double c = std::log(a * (q + 1.0));
    double sum = 0.0;
    for (double s : spacings) {
        // s^q is taken as 1 at q = 0 even for s = 0.
        const double log_s_term = q == 0.0 ? 0.0 : q * std::log(s);
        sum += c + log_s_term - a * std::pow(s, q + 1.0);
    }
    return sum / static_cast<double>(spacings.size());
}

BrodyFit fit_brody(std::span<const double> spacings)
{
    if (spacings.size() < 50)
        throw InsufficientData("Brody fit needs at least 50 spacings, got " + std::to_string(spacings.size()));
    const auto [mn, mx] = std::minmax_element(spacings.begin(), spacings.end());
    if (*mx - *mn <= 1e-12 * std::max(1.0, std::abs(*mx)))
        throw FitDegenerate("all spacings are equal; the Brody likelihood has no unique maximum");
    for (double s : spacings)
        if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("spacings must be finite and >= 0");

    const auto ll = [&](double q) { return brody_log_likelihood(spacings, q); };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0;
    double b = 1.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = ll(x1);
    double f2 = ll(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = ll(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = ll(x1);
        }
    }
    double q = 0.5 * (a + b);
    // The interior search never evaluates the end points exactly.
    for (double edge : {0.0, 1.0})
        if (ll(edge) > ll(q)) q = edge;

    const double h = 1e-3;
    const double qc = std::clamp(q, h, 1.0 - h);
    const double total = static_cast<double>(spacings.size());
    const double curvature = total * (ll(qc + h) - 2.0 * ll(qc) + ll(qc - h)) / (h * h);

    BrodyFit fit;
    fit.q = q;
    fit.q_err = curvature < 0.0 ? 1.0 / std::sqrt(-curvature) : std::numeric_limits<double>::infinity();
    fit.alpha = brody_alpha(q);
    fit.log_likelihood = total * ll(q);
    fit.n_samples = spacings.size();
    return fit;
}

Histogram histogram(std::span<const double> spacings, double bin_width, double s_max)
{
    if (!(bin_width > 0.0) || !(s_max > 0.0)) throw InvalidArgument("histogram: bin width and range must be positive");
    const auto bins = static_cast<std::size_t>(std::llround(s_max / bin_width));
    if (bins == 0 || std::abs(static_cast<double>(bins) * bin_width - s_max) > 1e-9 * s_max)
        throw InvalidArgument("histogram: range must be a whole number of bins");

    Histogram h;
    h.bin_width = bin_width;
    h.s_max = s_max;
    h.counts.assign(bins, 0);
    for (double s : spacings) {
        if (s < 0.0 || s > s_max) continue;
        const auto k = std::min(bins - 1, static_cast<std::size_t>(s / bin_width));
        ++h.counts[k];
    }
    const double total = static_cast<double>(spacings.size());
    for (std::size_t k = 0; k < bins; ++k) {
        h.centers.push_back((static_cast<double>(k) + 0.5) * bin_width);
        h.density.push_back(total > 0.0 ? static_cast<double>(h.counts[k]) / (total * bin_width) : 0.0);
    }
    return h;
}

NnsResult nns_pipeline(double sg, double sf, double beta, std::span<const int> n_list, double se,
                       const NnsOptions& options)
{
    if (n_list.empty()) throw InvalidArgument("nns_pipeline: empty manifold list");
    for (int n : n_list)
        if (n < 1) throw InvalidArgument("nns_pipeline: manifolds must be >= 1");

    NnsResult result{sg, sf, beta, se, options, {}, {}, {}, {}};
    std::vector<SpacingEnsemble> parts(n_list.size());
    std::vector<ManifoldContribution> info(n_list.size());

    const auto unfold_any = [&](const LevelSequence& seq) {
        return options.local ? unfold_local(seq, options.local_half_width) : unfold(seq, options.degree);
    };

    parallel_for(n_list.size(), options.threads, [&](std::size_t i) {
        const int n = n_list[i];
        const FieldParams params = FieldParams::from_scaled(n, sg, sf, beta);
        const ManifoldSpectrum spec = solve_manifold(n, params);
        const LevelSequence seq = make_level_sequence(n, spec.energies, params);
        const LevelSequence win = window_levels(seq, se, sg);
        info[i] = {n, seq.energies.size(), win.energies.size(), 0};
        if (options.window_first) {
            if (win.energies.size() < 10) return;
            parts[i] = unfold_any(win);
        } else {
            if (seq.energies.size() < 10) return;
            const SpacingEnsemble all = unfold_any(seq);
            const double n2 = static_cast<double>(n) * n;
            SpacingEnsemble kept;
            for (std::size_t k = 0; k < all.spacings.size(); ++k) {
                const bool lo = std::abs(n2 * seq.energies[k] - se) <= 0.1 * sg;
                const bool hi = std::abs(n2 * seq.energies[k + 1] - se) <= 0.1 * sg;
                if (lo && hi) kept.spacings.push_back(all.spacings[k]);
            }
            if (kept.spacings.size() < 9) return;
            rescale_unit_mean(kept.spacings);
            kept.manifolds = {n};
            kept.unfolding = all.unfolding + ", whole manifold";
            parts[i] = std::move(kept);
        }
        info[i].spacings = parts[i].spacings.size();
    });

    result.manifolds = info;
    result.ensemble = pool(parts);
    std::ostringstream w;
    w.precision(12);
    w << "|n^2 E - (" << se << ")| <= " << 0.1 * sg;
    result.ensemble.window = w.str();
    if (result.ensemble.unfolding.empty())
        result.ensemble.unfolding = options.local ? "local mean" : "staircase polynomial degree " + std::to_string(options.degree);
    if (result.ensemble.spacings.size() < 50)
        throw InsufficientData("nns_pipeline: only " + std::to_string(result.ensemble.spacings.size()) +
                               " spacings in the window across the requested manifolds");
    result.hist = histogram(result.ensemble.spacings, options.bin_width, options.s_max);
    result.fit = fit_brody(result.ensemble.spacings);
    return result;
}

} // namespace crossfield
