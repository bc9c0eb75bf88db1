#include "crossfield/oscillator_basis.hpp"

#include "crossfield/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

namespace crossfield {

int OscBasisState::quanta() const { return 2 * n_mu + 2 * n_nu + 2 * std::abs(m); }

std::vector<OscBasisState> enumerate_basis(const TruncationScheme& scheme)
{
    if (scheme.m_min > scheme.m_max) throw InvalidArgument("enumerate_basis: empty m range");
    if (scheme.max_quanta < 0) throw InvalidArgument("enumerate_basis: negative quanta cap");
    std::vector<OscBasisState> out;
    for (int m = scheme.m_min; m <= scheme.m_max; ++m) {
        const int budget = scheme.max_quanta / 2 - std::abs(m);
        for (int total = 0; total <= budget; ++total)
            for (int n_mu = 0; n_mu <= total; ++n_mu) out.push_back({n_mu, total - n_mu, m});
    }
    if (out.empty()) throw InvalidArgument("enumerate_basis: truncation admits no state");
    std::sort(out.begin(), out.end(), [](const OscBasisState& l, const OscBasisState& r) {
        return std::make_tuple(std::abs(l.m), l.m, l.n_mu + l.n_nu, l.n_mu) <
               std::make_tuple(std::abs(r.m), r.m, r.n_mu + r.n_nu, r.n_mu);
    });
    return out;
}

namespace {

long long pack(const OscBasisState& s)
{
    return (static_cast<long long>(s.m) + (1LL << 20)) << 42 | static_cast<long long>(s.n_mu) << 21 |
           static_cast<long long>(s.n_nu);
}

} // namespace

OscBasisIndex::OscBasisIndex(const std::vector<OscBasisState>& states)
{
    index_.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) index_.emplace(pack(states[i]), static_cast<long>(i));
}

long OscBasisIndex::find(const OscBasisState& s) const
{
    if (s.n_mu < 0 || s.n_nu < 0) return -1;
    const auto it = index_.find(pack(s));
    return it == index_.end() ? -1 : it->second;
}

namespace radial {

double rho2(int n_out, int n_in, int a)
{
    if (n_out < 0 || n_in < 0) return 0.0;
    if (n_out == n_in) return 2.0 * n_in + a + 1.0;
    if (n_out == n_in + 1) return -std::sqrt((n_in + 1.0) * (n_in + a + 1.0));
    if (n_out == n_in - 1) return -std::sqrt(static_cast<double>(n_in) * (n_in + a));
    return 0.0;
}

double rho4(int n_out, int n_in, int a)
{
    double sum = 0.0;
    for (int k = n_in - 1; k <= n_in + 1; ++k)
        if (k >= 0) sum += rho2(n_out, k, a) * rho2(k, n_in, a);
    return sum;
}

double rho_shift(int n_out, int a_out, int n_in, int a_in)
{
    if (n_out < 0 || n_in < 0) return 0.0;
    // rho R_{N,a} = sqrt(N+a+1) R_{N,a+1} - sqrt(N) R_{N-1,a+1}
    if (a_out == a_in + 1) {
        if (n_out == n_in) return std::sqrt(n_in + a_in + 1.0);
        if (n_out == n_in - 1) return -std::sqrt(static_cast<double>(n_in));
        return 0.0;
    }
    if (a_out == a_in - 1) return rho_shift(n_in, a_in, n_out, a_out);
    return 0.0;
}

double rho3_shift(int n_out, int a_out, int n_in, int a_in)
{
    double sum = 0.0;
    for (int k = n_in - 1; k <= n_in + 1; ++k)
        if (k >= 0) sum += rho2(n_out, k, a_out) * rho_shift(k, a_out, n_in, a_in);
    return sum;
}

} // namespace radial

namespace {

double element(const OscBasisState& out, const OscBasisState& in, OscillatorTerm term)
{
    using namespace radial;
    const int a = std::abs(in.m);
    const bool same_m = out.m == in.m;
    const bool same_mu = out.n_mu == in.n_mu;
    const bool same_nu = out.n_nu == in.n_nu;

    switch (term) {
    case OscillatorTerm::Kinetic:
        return (same_m && same_mu && same_nu) ? -2.0 * (2.0 * in.n_mu + a + 1.0) - 2.0 * (2.0 * in.n_nu + a + 1.0)
                                              : 0.0;
    case OscillatorTerm::MuSquared:
        return (same_m && same_nu) ? rho2(out.n_mu, in.n_mu, a) : 0.0;
    case OscillatorTerm::NuSquared:
        return (same_m && same_mu) ? rho2(out.n_nu, in.n_nu, a) : 0.0;
    case OscillatorTerm::MuFourth:
        return (same_m && same_nu) ? rho4(out.n_mu, in.n_mu, a) : 0.0;
    case OscillatorTerm::NuFourth:
        return (same_m && same_mu) ? rho4(out.n_nu, in.n_nu, a) : 0.0;
    case OscillatorTerm::MuSquaredNuSquared:
        return same_m ? rho2(out.n_mu, in.n_mu, a) * rho2(out.n_nu, in.n_nu, a) : 0.0;
    case OscillatorTerm::Diamagnetic:
        return same_m ? rho4(out.n_mu, in.n_mu, a) * rho2(out.n_nu, in.n_nu, a) +
                            rho2(out.n_mu, in.n_mu, a) * rho4(out.n_nu, in.n_nu, a)
                      : 0.0;
    case OscillatorTerm::AngularMomentum: {
        if (!same_m) return 0.0;
        const double s = (same_nu ? rho2(out.n_mu, in.n_mu, a) : 0.0) + (same_mu ? rho2(out.n_nu, in.n_nu, a) : 0.0);
        return -static_cast<double>(in.m) * s;
    }
    case OscillatorTerm::PerpStark: {
        if (std::abs(out.m - in.m) != 1) return 0.0;
        const int b = std::abs(out.m);
        // cos(phi) = (e^{i phi} + e^{-i phi}) / 2; exactly one exponential connects m to out.m.
        return 0.5 * (rho3_shift(out.n_mu, b, in.n_mu, a) * rho_shift(out.n_nu, b, in.n_nu, a) +
                      rho_shift(out.n_mu, b, in.n_mu, a) * rho3_shift(out.n_nu, b, in.n_nu, a));
    }
    }
    return 0.0;
}

} // namespace

Eigen::SparseMatrix<double> term_matrix(const std::vector<OscBasisState>& basis, OscillatorTerm term)
{
    const OscBasisIndex index(basis);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    const int dm_range = term == OscillatorTerm::PerpStark ? 1 : 0;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.size() * 16);
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const OscBasisState& in = basis[col];
        for (int dm = -dm_range; dm <= dm_range; ++dm) {
            if (dm_range > 0 && dm == 0) continue;
            for (int dmu = -2; dmu <= 2; ++dmu) {
                for (int dnu = -2; dnu <= 2; ++dnu) {
                    const OscBasisState out{in.n_mu + dmu, in.n_nu + dnu, in.m + dm};
                    const long row = index.find(out);
                    if (row < 0) continue;
                    const double value = element(out, in, term);
                    if (value != 0.0) triplets.emplace_back(row, static_cast<Eigen::Index>(col), value);
                }
            }
        }
    }
    Eigen::SparseMatrix<double> out(dim, dim);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

} // namespace crossfield
