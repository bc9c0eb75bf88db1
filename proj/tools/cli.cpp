#include "cli.hpp"

#include "crossfield/errors.hpp"
#include "crossfield/exact_quantum.hpp"
#include "crossfield/perturbation.hpp"
#include "crossfield/secular_dynamics.hpp"
#include "crossfield/spectral_statistics.hpp"
#include "crossfield/surface_of_section.hpp"
#include "crossfield/table_io.hpp"
#include "crossfield/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace crossfield::cli {

namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
        throw UsageError("not a number: '" + text + "'");
    return v;
}

/// Splits "123.4unit" into the number and the trimmed unit suffix.
std::pair<double, std::string> split_quantity(const std::string& text)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc()) throw UsageError("not a quantity: '" + text + "'");
    return {v, trim(std::string(r.ptr, t.data() + t.size()))};
}

// ---------------------------------------------------------------------------
// Shared option blocks

struct FieldOptions {
    std::string units;
    std::string b_text;
    std::string f_text;
    double gamma = 0.0;
    double f = 0.0;
    CLI::Option* b_opt = nullptr;
    CLI::Option* f_lab_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* f_au_opt = nullptr;

    void attach(CLI::App* app)
    {
        app->add_option("--units", units, "Unit system of the field flags")->check(CLI::IsMember({"lab", "au"}));
        b_opt = app->add_option("--B", b_text, "Magnetic field, e.g. 100T");
        f_lab_opt = app->add_option("--F", f_text, "Electric field, e.g. 50kV/cm");
        gamma_opt = app->add_option("--gamma", gamma, "Magnetic field in atomic units");
        f_au_opt = app->add_option("--f", f, "Electric field in atomic units");
    }

    /// Resolves to atomic units and records the conversion.
    std::pair<double, double> resolve(json& manifest) const
    {
        const bool lab = b_opt->count() > 0 || f_lab_opt->count() > 0;
        const bool au = gamma_opt->count() > 0 || f_au_opt->count() > 0;
        if (lab && au) throw UsageError("conflicting unit flags: --B/--F (lab) mixed with --gamma/--f (au)");
        std::string system = units;
        if (system.empty()) system = au ? "au" : "lab";
        if (system == "lab" && au) throw UsageError("--units lab conflicts with --gamma/--f");
        if (system == "au" && lab) throw UsageError("--units au conflicts with --B/--F");

        json u;
        u["system"] = system;
        double g = 0.0;
        double fa = 0.0;
        if (system == "lab") {
            const double tesla = b_opt->count() ? parse_tesla(b_text) : 0.0;
            const double kv = f_lab_opt->count() ? parse_kv_per_cm(f_text) : 0.0;
            g = units::gamma_from_tesla(tesla);
            fa = units::f_from_kv_per_cm(kv);
            u["B_tesla"] = tesla;
            u["F_kv_per_cm"] = kv;
            u["tesla_per_au"] = units::tesla_per_au;
            u["volt_per_cm_per_au"] = units::volt_per_cm_per_au;
        } else {
            g = gamma;
            fa = f;
        }
        if (!(g >= 0.0) || !(fa >= 0.0)) throw UsageError("field strengths must be non-negative");
        u["gamma_au"] = g;
        u["f_au"] = fa;
        manifest["units"] = u;
        return {g, fa};
    }
};

struct ScaledOptions {
    double sg = 0.0;
    double sf = 0.0;
    double se = -0.5;

    void attach(CLI::App* app)
    {
        app->add_option("--sg", sg, "Scaled magnetic field n^3 gamma")->required();
        app->add_option("--sf", sf, "Scaled electric field n^4 f")->required();
        app->add_option("--se", se, "Scaled energy n^2 E")->capture_default_str();
    }

    void record(json& manifest) const { manifest["scaled"] = {{"sg", sg}, {"sf", sf}, {"se", se}}; }
};

struct CommonOptions {
    std::string out;
    unsigned threads = 0;

    void attach(CLI::App* app, const std::string& default_out)
    {
        out = default_out;
        app->add_option("--out", out, "Output path prefix")->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (0 = hardware)")->capture_default_str();
    }
};

std::vector<double> betas_radians(const std::string& text)
{
    std::vector<double> deg = parse_real_list(text);
    for (double d : deg)
        if (d < 0.0 || d > 90.0) throw UsageError("beta must lie in [0, 90] degrees");
    std::vector<double> rad;
    for (double d : deg) rad.push_back(units::radians(d));
    return rad;
}

std::string beta_tag(double beta)
{
    std::string s = format_number(units::degrees(beta));
    std::replace(s.begin(), s.end(), '.', 'p');
    return "beta" + s;
}

// ---------------------------------------------------------------------------
// Output

class Outputs {
public:
    explicit Outputs(std::string prefix) : prefix_(std::move(prefix)) {}

    std::ofstream open(const std::string& suffix)
    {
        const std::string path = prefix_ + suffix;
        const std::filesystem::path parent = std::filesystem::path(path).parent_path();
        std::error_code ec;
        if (!parent.empty()) std::filesystem::create_directories(parent, ec);
        std::ofstream os(path, std::ios::binary);
        if (!os) throw IoError("cannot open '" + path + "' for writing");
        files_.push_back(path);
        return os;
    }

    void close(std::ofstream& os)
    {
        os.close();
        if (!os) throw IoError("write failed for '" + files_.back() + "'");
    }

    void manifest(json m)
    {
        m["version"] = CROSSFIELD_VERSION;
        m["outputs"] = files_;
        auto os = open(".manifest.json");
        os << m.dump(2) << '\n';
        close(os);
    }

private:
    std::string prefix_;
    std::vector<std::string> files_;
};

// ---------------------------------------------------------------------------
// Commands

struct PtxCommand {
    FieldOptions fields;
    CommonOptions common;
    std::string n_text;
    std::string beta_text = "0:90:1";

    void attach(CLI::App* app)
    {
        fields.attach(app);
        common.attach(app, "ptx");
        app->add_option("--n", n_text, "Manifolds, e.g. 9 or 5,9 or 50:60")->required();
        app->add_option("--beta", beta_text, "Angles in degrees: list or a:b:step")->capture_default_str();
    }

    int run(std::ostream& log)
    {
        json m{{"command", "ptx"}};
        const auto [g, f] = fields.resolve(m);
        const std::vector<int> ns = parse_int_list(n_text);
        const std::vector<double> betas = betas_radians(beta_text);
        const EBetaScan scan = ebeta_scan(ns, g, f, betas, common.threads);
        Outputs out(common.out);
        auto os = out.open(".csv");
        write_ptx_csv(os, scan.spectra);
        out.close(os);
        m["n"] = ns;
        m["beta_deg"] = parse_real_list(beta_text);
        m["method"] = "extended intramanifold perturbation matrix, dense diagonalization";
        out.manifest(m);
        log << "ptx: " << scan.spectra.size() << " spectra written to " << common.out << ".csv\n";
        return kSuccess;
    }
};

struct Pt12Command {
    FieldOptions fields;
    CommonOptions common;
    std::string n_text;
    std::string beta_text = "0";

    void attach(CLI::App* app)
    {
        fields.attach(app);
        common.attach(app, "pt12");
        app->add_option("--n", n_text, "Manifolds")->required();
        app->add_option("--beta", beta_text, "Angles in degrees")->capture_default_str();
    }

    int run(std::ostream& log)
    {
        json m{{"command", "pt12"}};
        const auto [g, f] = fields.resolve(m);
        std::vector<ManifoldSpectrum> spectra;
        for (int n : parse_int_list(n_text)) {
            for (double beta : betas_radians(beta_text)) {
                const FieldParams p{g, f, beta};
                spectra.push_back({n, p, conventional_spectrum(n, p), std::nullopt});
            }
        }
        Outputs out(common.out);
        auto os = out.open(".csv");
        write_ptx_csv(os, spectra);
        out.close(os);
        m["method"] = "first plus second order in the weak-field action-angle basis";
        out.manifest(m);
        log << "pt12: " << spectra.size() << " spectra written\n";
        return kSuccess;
    }
};

struct ExactCommand {
    FieldOptions fields;
    CommonOptions common;
    std::string n_text;
    double beta_deg = 0.0;
    std::string quanta_text = "40,50";
    std::string b_scale_text = "1,1.05";
    int m_max = -1;
    double tolerance = 1e-8;
    bool compare_ptx = false;

    void attach(CLI::App* app)
    {
        fields.attach(app);
        common.attach(app, "exact");
        app->add_option("--n", n_text, "Manifolds to resolve (small n)")->required();
        app->add_option("--beta", beta_deg, "Angle in degrees")->capture_default_str();
        app->add_option("--quanta", quanta_text, "Truncation ladder of max 2(N_mu+N_nu+|m|)")->capture_default_str();
        app->add_option("--b-scale", b_scale_text, "Dilations as multiples of sqrt(n)")->capture_default_str();
        app->add_option("--m-max", m_max, "Largest |m| kept (default n_max - 1)");
        app->add_option("--tolerance", tolerance, "Convergence tolerance in au")->capture_default_str();
        app->add_flag("--compare-ptx", compare_ptx, "Also write a comparison with the perturbation matrix");
    }

    int run(std::ostream& log)
    {
        json m{{"command", "exact"}};
        const auto [g, f] = fields.resolve(m);
        if (beta_deg < 0.0 || beta_deg > 90.0) throw UsageError("beta must lie in [0, 90] degrees");
        const FieldParams params{g, f, units::radians(beta_deg)};
        const std::vector<int> ns = parse_int_list(n_text);
        const int n_max = *std::max_element(ns.begin(), ns.end());
        const int mm = m_max >= 0 ? m_max : n_max - 1;
        std::vector<TruncationScheme> ladder;
        for (int q : parse_int_list(quanta_text)) ladder.push_back({q, -mm, mm});
        const std::vector<double> scales = parse_real_list(b_scale_text);

        std::vector<ExactRow> rows;
        std::vector<ManifoldSpectrum> ptx;
        bool all_converged = true;
        json per_n = json::array();
        for (int n : ns) {
            std::vector<double> b_grid;
            for (double s : scales) b_grid.push_back(s * default_dilation(n));
            const double shift = -0.5 / (static_cast<double>(n) * n);
            const ConvergenceTarget target{shift, static_cast<std::size_t>(n) * n};
            const ConvergenceReport rep = convergence_scan(ladder, b_grid, params, target, tolerance, common.threads);
            const ConvergenceEntry& largest = rep.at(ladder.size() - 1, 0, b_grid.size());
            for (std::size_t k = 0; k < rep.reference.size(); ++k) {
                rows.push_back({n, params, k, rep.reference[k], largest.b, largest.basis_size,
                                static_cast<bool>(rep.converged[k])});
                all_converged = all_converged && rep.converged[k];
            }
            per_n.push_back({{"n", n}, {"b", b_grid}, {"basis_size", largest.basis_size}});
            if (compare_ptx) ptx.push_back(solve_manifold(n, params));
        }

        Outputs out(common.out);
        auto os = out.open(".csv");
        write_exact_csv(os, rows);
        out.close(os);
        if (compare_ptx) {
            auto cs = out.open(".compare.csv");
            CsvWriter w(cs, {"n", "level_index", "exact_au", "ptx_au", "diff_au"});
            std::size_t r = 0;
            for (const ManifoldSpectrum& s : ptx) {
                for (std::size_t k = 0; k < s.energies.size(); ++k, ++r) {
                    w << s.n << k << rows[r].energy << s.energies[k] << rows[r].energy - s.energies[k];
                    w.end_row();
                }
            }
            out.close(cs);
        }
        m["beta_deg"] = beta_deg;
        m["truncation"] = {{"quanta", parse_int_list(quanta_text)}, {"m_max", mm}};
        m["manifolds"] = per_n;
        m["tolerance"] = tolerance;
        m["all_converged"] = all_converged;
        out.manifest(m);
        if (!all_converged) log << "exact: warning: some states did not converge (converged=false rows)\n";
        log << "exact: " << rows.size() << " levels written\n";
        return kSuccess;
    }
};

struct GapsCommand {
    FieldOptions fields;
    CommonOptions common;
    std::string n_text;
    std::string beta_text = "0:90:0.25";

    void attach(CLI::App* app)
    {
        fields.attach(app);
        common.attach(app, "ebeta-gaps");
        app->add_option("--n", n_text, "Manifolds")->required();
        app->add_option("--beta", beta_text, "Angle grid in degrees")->capture_default_str();
    }

    int run(std::ostream& log)
    {
        json m{{"command", "ebeta-gaps"}};
        const auto [g, f] = fields.resolve(m);
        const std::vector<int> ns = parse_int_list(n_text);
        const EBetaScan scan = ebeta_scan(ns, g, f, betas_radians(beta_text), common.threads);
        Outputs out(common.out);
        auto os = out.open(".csv");
        CsvWriter w(os, {"n", "beta_deg", "lower_level", "gap_au", "gap_cm1"});
        std::size_t count = 0;
        for (int n : ns) {
            for (const GapMinimum& gm : min_gap_analysis(scan, n)) {
                w << n << units::degrees(gm.beta) << gm.lower_level << gm.gap << units::to_wavenumber(gm.gap);
                w.end_row();
                ++count;
            }
        }
        out.close(os);
        m["n"] = ns;
        m["beta_grid"] = beta_text;
        out.manifest(m);
        log << "ebeta-gaps: " << count << " gap minima written\n";
        return kSuccess;
    }
};

struct PsosCommand {
    ScaledOptions scaled;
    CommonOptions common;
    std::string beta_text;
    std::size_t grid = 20;
    double t_end = 1000.0;
    double tol = 1e-11;
    double threshold = 0.3;

    void attach(CLI::App* app)
    {
        scaled.attach(app);
        common.attach(app, "psos");
        app->add_option("--beta", beta_text, "Angles in degrees")->required();
        app->add_option("--grid", grid, "Seeds per axis of the (J1z, phi1) grid")->capture_default_str();
        app->add_option("--t-end", t_end, "Scaled integration time per trajectory")->capture_default_str();
        app->add_option("--tol", tol, "Integrator absolute and relative tolerance")->capture_default_str();
        app->add_option("--chaos-threshold", threshold, "J1z spread counted as chaotic")->capture_default_str();
    }

    int run(std::ostream& log)
    {
        json m{{"command", "psos"}};
        scaled.record(m);
        PsosOptions opt;
        opt.t_end = t_end;
        opt.integrator.abs_tol = tol;
        opt.integrator.rel_tol = tol;
        opt.threads = common.threads;
        const std::vector<SectionSeed> seeds = seed_grid(grid, grid);
        Outputs out(common.out);
        json runs = json::array();
        for (double beta : betas_radians(beta_text)) {
            const ScaledParams p{scaled.sg, scaled.sf, beta, scaled.se};
            const PsosResult r = psos(p, seeds, opt);
            const PsosSummary s = summarize(r, threshold);
            auto os = out.open("_" + beta_tag(beta) + ".csv");
            write_psos_csv(os, r);
            out.close(os);
            json skipped = json::array();
            for (const SeedResult& sr : r.seeds)
                if (!sr.skipped.empty() || !sr.diagnostic.empty())
                    skipped.push_back({{"seed_id", sr.seed_id}, {"skipped", sr.skipped}, {"diagnostic", sr.diagnostic}});
            runs.push_back({{"beta_deg", units::degrees(beta)},
                            {"trajectories", s.trajectories},
                            {"chaotic_fraction", s.chaotic_fraction},
                            {"occupied_cells", s.occupied_cells},
                            {"chaotic_occupied_cells", s.chaotic_occupied_cells},
                            {"max_energy_error", s.max_energy_error},
                            {"seed_issues", skipped}});
            log << "psos beta=" << format_number(units::degrees(beta)) << ": chaotic fraction "
                << format_number(s.chaotic_fraction) << ", " << s.trajectories << " trajectories\n";
        }
        m["grid"] = grid;
        m["t_end"] = t_end;
        m["integrator"] = {{"method", "Dormand-Prince 5(4) dense output"}, {"abs_tol", tol}, {"rel_tol", tol}};
        m["section"] = {{"condition", "phi2 = 0, dphi2/dt > 0"}, {"crossing_tol", opt.crossing_tol}};
        m["thresholds"] = {{"chaotic_j1z_spread", threshold}, {"cells", 50}};
        m["runs"] = runs;
        out.manifest(m);
        return kSuccess;
    }
};

struct LyapCommand {
    ScaledOptions scaled;
    CommonOptions common;
    double beta_deg = 0.0;
    std::size_t grid = 3;
    double total_time = 2000.0;
    double renorm = 10.0;
    double separation = 1e-8;
    unsigned seed = 7;

    void attach(CLI::App* app)
    {
        scaled.attach(app);
        common.attach(app, "lyap");
        app->add_option("--beta", beta_deg, "Angle in degrees")->required();
        app->add_option("--grid", grid, "Seeds per axis")->capture_default_str();
        app->add_option("--time", total_time, "Total scaled time")->capture_default_str();
        app->add_option("--renorm", renorm, "Renormalization interval")->capture_default_str();
        app->add_option("--separation", separation, "Initial separation")->capture_default_str();
        app->add_option("--seed", seed, "Seed for the partner displacement")->capture_default_str();
    }

    int run(std::ostream& log)
    {
        json m{{"command", "lyap"}};
        scaled.record(m);
        if (beta_deg < 0.0 || beta_deg > 90.0) throw UsageError("beta must lie in [0, 90] degrees");
        const ScaledParams p{scaled.sg, scaled.sf, units::radians(beta_deg), scaled.se};
        p.validate();
        const SecularFrames frames = secular_frames(p);
        Outputs out(common.out);
        auto os = out.open(".csv");
        CsvWriter w(os, {"seed_id", "branch", "J1z", "phi1", "exponent"});
        const std::vector<SectionSeed> seeds = seed_grid(grid, grid);
        double largest = 0.0;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const std::vector<double> roots = section_roots(p, frames, seeds[i]);
            for (std::size_t b = 0; b < roots.size(); ++b) {
                const SecularState s = state_from_action_angle({seeds[i].j1z, seeds[i].phi1, roots[b], 0.0}, frames);
                const SecularState q = shell_partner(s, p, separation, seed);
                const LyapunovEstimate e = chaos_indicator(s, q, p, total_time, renorm);
                w << i << b << seeds[i].j1z << seeds[i].phi1 << e.exponent;
                w.end_row();
                largest = std::max(largest, e.exponent);
            }
        }
        out.close(os);
        m["beta_deg"] = beta_deg;
        m["benettin"] = {{"time", total_time}, {"renorm", renorm}, {"separation", separation}, {"seed", seed}};
        m["largest_exponent"] = largest;
        out.manifest(m);
        log << "lyap: largest exponent " << format_number(largest) << '\n';
        return kSuccess;
    }
};

struct NnsCommand {
    ScaledOptions scaled;
    CommonOptions common;
    std::string beta_text;
    std::string n_text = "50:60";
    bool unfold_first = false;
    std::string unfolding = "staircase";
    int degree = 3;
    int local_width = 10;
    double bin_width = 0.25;

    void attach(CLI::App* app)
    {
        scaled.attach(app);
        common.attach(app, "nns");
        app->add_option("--beta", beta_text, "Angles in degrees")->required();
        app->add_option("--n", n_text, "Manifolds")->capture_default_str();
        app->add_flag("--unfold-first", unfold_first, "Unfold whole manifolds, then window");
        app->add_option("--unfolding", unfolding, "staircase (polynomial fit) or local (moving mean)")
            ->check(CLI::IsMember({"staircase", "local"}))
            ->capture_default_str();
        app->add_option("--degree", degree, "Staircase polynomial degree")->capture_default_str();
        app->add_option("--local-width", local_width, "Neighbours on each side for local unfolding")->capture_default_str();
        app->add_option("--bin-width", bin_width, "Histogram bin width on [0, 4]")->capture_default_str();
    }

    int run(std::ostream& log)
    {
        json m{{"command", "nns"}};
        scaled.record(m);
        const std::vector<int> ns = parse_int_list(n_text);
        NnsOptions opt;
        opt.window_first = !unfold_first;
        opt.degree = degree;
        opt.local = unfolding == "local";
        opt.local_half_width = local_width;
        opt.bin_width = bin_width;
        opt.threads = common.threads;
        Outputs out(common.out);
        json fits = json::array();
        for (double beta : betas_radians(beta_text)) {
            const NnsResult r = nns_pipeline(scaled.sg, scaled.sf, beta, ns, scaled.se, opt);
            const std::string tag = "_" + beta_tag(beta);
            auto hs = out.open(tag + ".hist.csv");
            write_histogram_csv(hs, r.hist);
            out.close(hs);
            json report = fit_report(r.fit, r.ensemble);
            auto fs = out.open(tag + ".fit.json");
            fs << report.dump(2) << '\n';
            out.close(fs);
            report["beta_deg"] = units::degrees(beta);
            fits.push_back(report);
            log << "nns beta=" << format_number(units::degrees(beta)) << ": q = " << format_number(r.fit.q)
                << " +/- " << format_number(r.fit.q_err) << " from " << r.fit.n_samples << " spacings\n";
        }
        m["n"] = ns;
        m["order"] = unfold_first ? "unfold then window" : "window then unfold";
        m["fits"] = fits;
        out.manifest(m);
        return kSuccess;
    }
};

struct SaddleCommand {
    FieldOptions fields;
    CommonOptions common;

    void attach(CLI::App* app)
    {
        fields.attach(app);
        common.attach(app, "saddle");
    }

    int run(std::ostream& log)
    {
        json m{{"command", "saddle"}};
        const double f = fields.resolve(m).second;
        const double e = stark_saddle_energy(f);
        Outputs out(common.out);
        auto os = out.open(".csv");
        CsvWriter w(os, {"f_au", "energy_au", "energy_cm1"});
        w << f << e << units::to_wavenumber(e);
        w.end_row();
        out.close(os);
        out.manifest(m);
        log << "saddle: E = " << format_number(e) << " au = " << format_number(units::to_wavenumber(e))
            << " cm^-1\n";
        return kSuccess;
    }
};

} // namespace

double parse_tesla(const std::string& text)
{
    const auto [v, unit] = split_quantity(text);
    if (unit.empty() || unit == "T") return v;
    throw UsageError("unknown magnetic unit '" + unit + "' (use T)");
}

double parse_kv_per_cm(const std::string& text)
{
    const auto [v, unit] = split_quantity(text);
    if (unit.empty() || unit == "kV/cm") return v;
    if (unit == "V/cm") return v * 1e-3;
    throw UsageError("unknown electric unit '" + unit + "' (use kV/cm or V/cm)");
}

std::vector<double> parse_real_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) throw UsageError("empty element in list '" + text + "'");
        std::vector<std::string> parts;
        std::stringstream is(item);
        std::string p;
        while (std::getline(is, p, ':')) parts.push_back(p);
        if (parts.size() == 1) {
            out.push_back(parse_double(parts[0]));
        } else if (parts.size() == 3) {
            const double a = parse_double(parts[0]);
            const double b = parse_double(parts[1]);
            const double step = parse_double(parts[2]);
            if (!(step > 0.0) || b < a) throw UsageError("range '" + item + "' needs a <= b and step > 0");
            const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
            for (long k = 0; k <= count; ++k) {
                const double v = a + static_cast<double>(k) * step;
                // Snap the last point onto b so 0:90:0.5 ends at exactly 90.
                out.push_back(std::abs(v - b) < 1e-9 * std::max(1.0, std::abs(b)) ? b : v);
            }
        } else {
            throw UsageError("cannot parse '" + item + "' (use v or a:b:step)");
        }
    }
    if (out.empty()) throw UsageError("empty list");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    const auto to_int = [&](const std::string& s) {
        const std::string t = trim(s);
        int v = 0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
            throw UsageError("not an integer: '" + s + "'");
        return v;
    };
    while (std::getline(ss, item, ',')) {
        std::vector<std::string> parts;
        std::stringstream is(item);
        std::string p;
        while (std::getline(is, p, ':')) parts.push_back(p);
        if (parts.size() == 1) {
            out.push_back(to_int(parts[0]));
        } else if (parts.size() == 2 || parts.size() == 3) {
            const int a = to_int(parts[0]);
            const int b = to_int(parts[1]);
            const int step = parts.size() == 3 ? to_int(parts[2]) : 1;
            if (step <= 0 || b < a) throw UsageError("range '" + item + "' needs a <= b and step > 0");
            for (int v = a; v <= b; v += step) out.push_back(v);
        } else {
            throw UsageError("cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError("empty list");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& log)
{
    CLI::App app{"Hydrogen in arbitrarily oriented magnetic and electric fields", "crossfield"};
    app.set_version_flag("--version", std::string(CROSSFIELD_VERSION));
    app.set_config("--config", "", "TOML file with one [section] per subcommand; flags win");
    app.require_subcommand(1);

    PtxCommand ptx;
    Pt12Command pt12;
    ExactCommand exact;
    GapsCommand gaps;
    PsosCommand psos_cmd;
    LyapCommand lyap;
    NnsCommand nns;
    SaddleCommand saddle;

    std::vector<std::pair<CLI::App*, std::function<int(std::ostream&)>>> commands;
    const auto add = [&](const char* name, const char* help, auto& cmd) {
        CLI::App* sub = app.add_subcommand(name, help);
        cmd.attach(sub);
        commands.emplace_back(sub, [&cmd](std::ostream& l) { return cmd.run(l); });
    };
    add("ptx", "Extended perturbation spectra over a beta grid", ptx);
    add("pt12", "Conventional first plus second order spectra", pt12);
    add("exact", "Bound states from the dilated semiparabolic basis", exact);
    add("ebeta-gaps", "Avoided-crossing gap minima along beta", gaps);
    add("psos", "Poincare surfaces of section of the secular motion", psos_cmd);
    add("lyap", "Largest Lyapunov exponents on a seed grid", lyap);
    add("nns", "Nearest-neighbour spacing statistics and Brody fits", nns);
    add("saddle", "Classical Stark saddle-point energy", saddle);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        app.exit(e, log, log);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        app.exit(e, log, log);
        return kUsage;
    }

    try {
        for (auto& [sub, body] : commands)
            if (sub->parsed()) return body(log);
        log << "no subcommand given\n";
        return kUsage;
    } catch (const UsageError& e) {
        log << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        log << "invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const DegenerateFrame& e) {
        log << "degenerate frame: " << e.what() << '\n';
        return kNumerical;
    } catch (const UnsupportedConfiguration& e) {
        log << "unsupported configuration: " << e.what() << '\n';
        return kNumerical;
    } catch (const NumericalError& e) {
        log << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const InsufficientData& e) {
        log << "insufficient data: " << e.what() << '\n';
        return kInsufficientData;
    } catch (const FitDegenerate& e) {
        log << "degenerate fit: " << e.what() << '\n';
        return kInsufficientData;
    } catch (const IoError& e) {
        log << "i/o error: " << e.what() << '\n';
        return kIoError;
    }
}

} // namespace crossfield::cli
