#include "crossfield/table_io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace crossfield {

std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) value = 0.0;  // drop the sign of negative zero
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
    return {buf, r.ptr};
}

CsvWriter::CsvWriter(std::ostream& os, std::initializer_list<std::string_view> columns)
    : os_(os), columns_(columns.size())
{
    bool first = true;
    for (std::string_view c : columns) {
        if (!first) os_ << ',';
        os_ << c;
        first = false;
    }
    os_ << '\n';
}

void CsvWriter::separator()
{
    if (filled_ > 0) os_ << ',';
    ++filled_;
}

CsvWriter& CsvWriter::operator<<(double v)
{
    separator();
    os_ << format_number(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(int v)
{
    separator();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::size_t v)
{
    separator();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(bool v)
{
    separator();
    os_ << (v ? "true" : "false");
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view v)
{
    separator();
    os_ << v;
    return *this;
}

void CsvWriter::end_row()
{
    if (filled_ != columns_)
        throw std::logic_error("CSV row has " + std::to_string(filled_) + " fields, expected " +
                               std::to_string(columns_));
    os_ << '\n';
    filled_ = 0;
}

void write_ptx_csv(std::ostream& os, const std::vector<ManifoldSpectrum>& spectra)
{
    CsvWriter w(os, {"n", "beta_deg", "gamma_au", "f_au", "level_index", "energy_au", "energy_cm1"});
    for (const ManifoldSpectrum& s : spectra) {
        for (std::size_t k = 0; k < s.energies.size(); ++k) {
            w << s.n << units::degrees(s.params.beta) << s.params.gamma << s.params.f << k << s.energies[k]
              << units::to_wavenumber(s.energies[k]);
            w.end_row();
        }
    }
}

void write_exact_csv(std::ostream& os, const std::vector<ExactRow>& rows)
{
    CsvWriter w(os, {"n", "beta_deg", "gamma_au", "f_au", "level_index", "energy_au", "energy_cm1", "b",
                     "basis_size", "converged"});
    for (const ExactRow& r : rows) {
        w << r.n << units::degrees(r.params.beta) << r.params.gamma << r.params.f << r.level_index << r.energy
          << units::to_wavenumber(r.energy) << r.b << r.basis_size << r.converged;
        w.end_row();
    }
}

void write_psos_csv(std::ostream& os, const PsosResult& result)
{
    CsvWriter w(os, {"seed_id", "branch", "t", "phi1", "J1z"});
    for (const SeedResult& s : result.seeds) {
        for (const SectionTrajectory& tr : s.branches) {
            for (const SectionPoint& pt : tr.points) {
                w << s.seed_id << pt.branch << pt.t << pt.phi1 << pt.j1z;
                w.end_row();
            }
        }
    }
}

void write_histogram_csv(std::ostream& os, const Histogram& h)
{
    CsvWriter w(os, {"s_bin_center", "density", "count"});
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
        w << h.centers[k] << h.density[k] << h.counts[k];
        w.end_row();
    }
}

nlohmann::json fit_report(const BrodyFit& fit, const SpacingEnsemble& ensemble)
{
    return {{"q", fit.q},
            {"q_err", fit.q_err},
            {"alpha", fit.alpha},
            {"n_samples", fit.n_samples},
            {"window", ensemble.window},
            {"unfolding", ensemble.unfolding}};
}

} // namespace crossfield
