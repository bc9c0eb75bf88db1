#pragma once

#include "crossfield/perturbation.hpp"
#include "crossfield/spectral_statistics.hpp"
#include "crossfield/surface_of_section.hpp"

#include <json.hpp>

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace crossfield {

/// 12 significant digits, shortest form, independent of the global locale.
std::string format_number(double value);

/// Minimal CSV emitter: comma separated, '\n' line ends, no quoting (all
/// fields are numeric or plain identifiers).
class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::initializer_list<std::string_view> columns);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(int v);
    CsvWriter& operator<<(std::size_t v);
    CsvWriter& operator<<(bool v);
    CsvWriter& operator<<(std::string_view v);
    /// Terminates the current row; throws std::logic_error on a column count mismatch.
    void end_row();

private:
    void separator();
    std::ostream& os_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

/// Rows `n, beta_deg, gamma_au, f_au, level_index, energy_au, energy_cm1`.
void write_ptx_csv(std::ostream& os, const std::vector<ManifoldSpectrum>& spectra);

struct ExactRow {
    int n = 0;  ///< manifold the level is attributed to
    FieldParams params;
    std::size_t level_index = 0;
    double energy = 0.0;
    double b = 1.0;
    std::size_t basis_size = 0;
    bool converged = false;
};

/// The ptx columns followed by `b, basis_size, converged`.
void write_exact_csv(std::ostream& os, const std::vector<ExactRow>& rows);

/// Rows `seed_id, branch, t, phi1, J1z`, one per section point, in seed order.
void write_psos_csv(std::ostream& os, const PsosResult& result);

/// Rows `s_bin_center, density, count`.
void write_histogram_csv(std::ostream& os, const Histogram& h);

/// `{q, q_err, alpha, n_samples, window, unfolding}`.
nlohmann::json fit_report(const BrodyFit& fit, const SpacingEnsemble& ensemble);

} // namespace crossfield
