#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shearflow/brackets.hpp"
#include "shearflow/exponent.hpp"
#include "shearflow/fieldspec.hpp"
#include "shearflow/predictions.hpp"
#include "shearflow/scales.hpp"
#include "shearflow/simulate.hpp"

namespace shearflow {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_fixed(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

inline std::string render_report(const std::filesystem::path& run_dir);

enum class Verdict { PASS, FAIL, SKIPPED_INCONCLUSIVE, SKIPPED_PRECONDITION };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::FAIL: return "FAIL";
        case Verdict::SKIPPED_INCONCLUSIVE: return "SKIPPED-INCONCLUSIVE";
        case Verdict::SKIPPED_PRECONDITION: return "SKIPPED-PRECONDITION";
    }
    return "?";
}

struct VerdictRow {
    double t;
    std::string check;
    double lower;
    double upper;  ///< +inf for one-sided checks
    double measured;
    double stderror;
    Verdict verdict;
    std::string note;
};

/// PASS/FAIL only when the measurement resolves the bracket: 3*stderr must be
/// below 10% of the bracket width; one-sided brackets have infinite width and
/// are always conclusive. Otherwise SKIPPED-INCONCLUSIVE.
inline Verdict judge_bracket(double lower, double upper, double measured, double stderror) {
    const double width = upper - lower;
    if (!std::isinf(width) && !(3.0 * stderror < 0.1 * width)) return Verdict::SKIPPED_INCONCLUSIVE;
    const bool ok = measured >= lower && (std::isinf(upper) || measured <= upper);
    return ok ? Verdict::PASS : Verdict::FAIL;
}

struct RunRecord {
    std::filesystem::path dir;
    std::vector<VerdictRow> verdicts;
    int n_pass = 0, n_fail = 0, n_skipped = 0;
    int exit_code = 0;
    double richardson_rel_change = 0.0;
    bool richardson_ok = true;
    bool richardson_ran = false;
};

namespace detail {

inline std::string sanitize_note(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

}  // namespace detail

inline std::string msd_csv(const EnsembleStats& stats) {
    std::ostringstream os;
    os << "t,msd,stderr,n_paths,scheme,seed\n";
    for (const auto& r : stats.rows)
        os << fmt_double(r.t) << ',' << fmt_double(r.msd) << ',' << fmt_double(r.stderror) << ','
           << r.n_paths << ',' << scheme_name(stats.scheme) << ',' << stats.seed << '\n';
    return os.str();
}

inline std::string diffusivity_csv(const MultiscaleField& field) {
    std::ostringstream os;
    os << "p,variance,d22,thm32_lower,thm32_upper,lemma52_lower,lemma52_upper,preconditions\n";
    for (int p = 0; p <= field.top_scale(); ++p) {
        const auto var = variance(field, 0, p);
        const auto d = effective_diffusivity(field, p);
        const auto t32 = thm_diffusivity_bracket(field, p);
        const auto l52 = variance_bracket_lemma(field, p);
        os << p << ',' << fmt_double(var.variance) << ',' << fmt_double(d.d22) << ','
           << fmt_double(t32.lower) << ',' << fmt_double(t32.upper) << ',' << fmt_double(l52.lower)
           << ',' << fmt_double(l52.upper) << ',' << "thm32_ok=" << (t32.preconditions_ok ? 1 : 0)
           << ";lemma52_ok=" << (l52.preconditions_ok ? 1 : 0) << '\n';
    }
    return os.str();
}

inline std::string scales_csv(const MultiscaleField& field, const std::vector<double>& checkpoints,
                              bool h1_holds) {
    std::ostringstream os;
    os << "t,n_ef,n_ef_simple,p_of_t,nu_pred,nu_window_lo,nu_window_hi\n";
    const bool have_windows = field.top_scale() >= 1;
    NuWindow win{0.0, 0.0};
    if (have_windows) win = nu_window_leading(field.ladder);
    const bool have_p = have_windows && field.ladder.gamma_min > 2.0;
    for (double t : checkpoints) {
        os << fmt_double(t) << ',';
        if (h1_holds && have_windows) {
            try {
                os << n_ef(field, t);
            } catch (const std::exception&) {  // past the last threshold: blank cell
            }
        }
        os << ',';
        try {
            os << n_ef_simple(field, t);
        } catch (const std::exception&) {
        }
        os << ',';
        if (have_p) {
            if (const auto sp = p_of_t(field, t)) {
                os << sp->p << ',';
                if (sp->nu) os << fmt_double(*sp->nu);
            } else {
                os << ',';
            }
        } else {
            os << ',';
        }
        os << ',';
        if (have_windows) os << fmt_double(win.lo) << ',' << fmt_double(win.hi);
        else os << ',';
        os << '\n';
    }
    return os.str();
}

inline std::string verdicts_csv(const std::vector<VerdictRow>& rows) {
    std::ostringstream os;
    os << "t,check,lower,upper,measured,stderr,verdict,note\n";
    for (const auto& r : rows)
        os << fmt_double(r.t) << ',' << r.check << ',' << fmt_double(r.lower) << ','
           << fmt_double(r.upper) << ',' << fmt_double(r.measured) << ',' << fmt_double(r.stderror)
           << ',' << verdict_name(r.verdict) << ',' << detail::sanitize_note(r.note) << '\n';
    return os.str();
}

/// Full experiment orchestration: validate -> diffusivity table -> Richardson
/// pilot -> simulate -> scale counts -> brackets -> verdicts, persisted under
/// out_dir with a manifest sufficient to reproduce the artifacts byte for
/// byte. Thread count changes wall time only, never any output byte.
inline RunRecord run_experiment(const spec::ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                int threads = 1) {
    namespace fs = std::filesystem;
    RunRecord rec;
    rec.dir = out_dir;
    fs::create_directories(out_dir);

    const MultiscaleField* field = cfg.field ? &*cfg.field : nullptr;
    cfg.sim.validate(field);

    HypothesisReport hyp;
    if (field) hyp = validate_hypotheses(*field);

    // Richardson step check: halving the substep on a 256-path pilot (common
    // random numbers) should move the MSD by < 0.5%.
    if (!cfg.sim.zero_field()) {
        rec.richardson_rel_change = richardson_relative_change(field, cfg.sim, threads);
        rec.richardson_ok = rec.richardson_rel_change < 5e-3;
        rec.richardson_ran = true;
    }

    const EnsembleStats stats = msd_ensemble(field, cfg.sim, threads);
    detail::write_file(out_dir / "msd.csv", msd_csv(stats));

    if (field) detail::write_file(out_dir / "diffusivity.csv", diffusivity_csv(*field));
    if (field)
        detail::write_file(out_dir / "scales.csv", scales_csv(*field, cfg.sim.checkpoints, hyp.h1_holds));

    // --- verdicts ---
    std::string regime = cfg.analysis.regime;
    if (regime == "auto") {
        if (!field || cfg.sim.zero_field()) regime = "zero";
        else if (hyp.h1_holds) regime = "h1";
        else if (hyp.h2_holds) regime = "h2";
        else regime = "none";
    }

    for (std::size_t i = 0; i < stats.rows.size(); ++i) {
        const auto& row = stats.rows[i];
        if (regime == "zero") {
            VerdictRow v{row.t, "zero_calibration", row.t - 3.0 * row.stderror,
                         row.t + 3.0 * row.stderror, row.msd, row.stderror, Verdict::PASS, ""};
            v.verdict = (row.msd >= v.lower && row.msd <= v.upper) ? Verdict::PASS : Verdict::FAIL;
            v.note = "MSD must equal t within 3 stderr";
            rec.verdicts.push_back(v);
            continue;
        }
        if (!field || field->top_scale() < 1 || regime == "none") continue;
        BracketSource source = BracketSource::H1_eq46;
        if (regime == "h2") source = BracketSource::H2_explicit;
        else if (regime == "self_similar") source = BracketSource::selfsimilar_thm36;
        else if (regime == "fast_separation") source = BracketSource::fastsep_thm38;
        PredictionBracket b;
        try {
            b = msd_prediction_bracket(*field, row.t, source);
        } catch (const std::exception& e) {
            VerdictRow v{row.t, bracket_source_name(source), 0.0, 0.0, row.msd, row.stderror,
                         Verdict::SKIPPED_PRECONDITION, e.what()};
            rec.verdicts.push_back(v);
            continue;
        }
        VerdictRow v{row.t,    bracket_source_name(source), b.msd_lower, b.msd_upper,
                     row.msd,  row.stderror,                Verdict::PASS, b.report};
        v.verdict = b.preconditions_ok ? judge_bracket(b.msd_lower, b.msd_upper, row.msd, row.stderror)
                                       : Verdict::SKIPPED_PRECONDITION;
        rec.verdicts.push_back(v);
    }

    // Exponent window at the largest checkpoint (leading-order check).
    if (field && field->top_scale() >= 1 && regime != "zero" && regime != "none" &&
        stats.rows.size() >= static_cast<std::size_t>(cfg.analysis.fit_window)) {
        std::vector<double> ts, msds, errs;
        for (const auto& r : stats.rows) {
            ts.push_back(r.t);
            msds.push_back(r.msd);
            errs.push_back(r.stderror);
        }
        const ExponentFit fit = fit_exponent(ts, msds, errs, cfg.analysis.fit_window);
        if (const auto nu = fit.final_windowed()) {
            const double tol = cfg.analysis.exponent_tolerance;
            double lo, hi;
            std::string note;
            // the H2 exponent window speaks about nu(t) = ln gamma_{p(t)} / ln R_{p(t)},
            // which requires the largest checkpoint to sit beyond the first scale threshold
            bool h2_below_first_scale = false;
            if (regime == "h2") {
                const auto sp =
                    field->ladder.gamma_min > 2.0 ? p_of_t(*field, ts.back()) : std::nullopt;
                h2_below_first_scale = !sp || sp->p < 1;
            }
            if (regime == "fast_separation") {
                // compare against the discrete log-slope of the reference curve
                const std::size_t last = ts.size() - 1;
                const std::size_t first = ts.size() - static_cast<std::size_t>(cfg.analysis.fit_window);
                const double g = field->ladder.gamma_min;
                const double rho = field->ladder.rho_min;
                const double alpha = field->ladder.fastsep_alpha.value_or(2.0);
                const double ref_hi = fastsep_reference_msd(rho, alpha, g, ts[last]);
                const double ref_lo = fastsep_reference_msd(rho, alpha, g, ts[first]);
                const double slope =
                    (std::log(ref_hi) - std::log(ref_lo)) / (std::log(ts[last]) - std::log(ts[first]));
                lo = slope - 1.0 - tol;
                hi = slope - 1.0 + tol;
                note = "windowed nu vs fast-separation reference slope; leading-order check";
            } else {
                const NuWindow win = nu_window_leading(field->ladder);
                lo = win.lo - tol;
                hi = win.hi + tol;
                note = "windowed nu vs predicted exponent window; leading-order check";
            }
            VerdictRow v{ts.back(), "exponent_window", lo, hi, *nu, fit.final_windowed_stderr(),
                         Verdict::PASS, note};
            if (h2_below_first_scale) {
                v.verdict = Verdict::SKIPPED_PRECONDITION;
                v.note = "largest checkpoint below the first H2 scale threshold; window not applicable";
            } else if (3.0 * v.stderror > tol) {
                v.verdict = Verdict::SKIPPED_INCONCLUSIVE;
            } else {
                v.verdict = (*nu >= lo && *nu <= hi) ? Verdict::PASS : Verdict::FAIL;
            }
            rec.verdicts.push_back(v);
        }
    }

    detail::write_file(out_dir / "verdicts.csv", verdicts_csv(rec.verdicts));

    for (const auto& v : rec.verdicts) {
        if (v.verdict == Verdict::PASS) ++rec.n_pass;
        else if (v.verdict == Verdict::FAIL) ++rec.n_fail;
        else ++rec.n_skipped;
    }
    rec.exit_code = rec.n_fail > 0 ? 2 : 0;

    // --- manifest: resolved config + field spec + code version, no clocks ---
    nlohmann::json manifest;
    manifest["version"] = version_string;
    manifest["conventions"] = {{"gamma_minus_one", "gamma0/gamma_min"},
                               {"threads", "affect wall time only, never results"}};
    if (cfg.field) manifest["field"] = cfg.field_json;
    nlohmann::json simj;
    simj["checkpoints"] = cfg.sim.checkpoints;
    simj["base_dt"] = cfg.sim.base_dt;
    simj["substep_safety"] = cfg.sim.substep_safety;
    simj["n_paths"] = cfg.sim.n_paths;
    simj["seed"] = cfg.sim.seed;
    simj["scale_range"] = {{"k", cfg.sim.scale_k}, {"p", cfg.sim.scale_p}};
    simj["scheme"] = scheme_name(cfg.sim.scheme);
    manifest["sim"] = simj;
    manifest["analysis"] = {{"regime", cfg.analysis.regime},
                            {"resolved_regime", regime},
                            {"fit_window", cfg.analysis.fit_window},
                            {"exponent_tolerance", cfg.analysis.exponent_tolerance}};
    if (field) {
        manifest["field_constants"] = {{"K0", field->k0},
                                       {"K1", field->k1},
                                       {"K2", field->k2},
                                       {"epsilon", hyp.epsilon},
                                       {"h1_holds", hyp.h1_holds},
                                       {"h2_holds", hyp.h2_holds}};
    }
    if (rec.richardson_ran)
        manifest["richardson"] = {{"rel_change", rec.richardson_rel_change},
                                  {"ok", rec.richardson_ok},
                                  {"pilot_paths", 256}};
    detail::write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

    detail::write_file(out_dir / "report.txt", render_report(out_dir));
    return rec;
}

// --- report: a pure function of the run directory's artifacts ---

namespace detail {

inline std::vector<std::map<std::string, std::string>> read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing artifact " + p.string());
    std::string line;
    if (!std::getline(in, line)) return {};
    std::vector<std::string> headers;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) headers.push_back(cell);
    }
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::map<std::string, std::string> row;
        for (const auto& h : headers) {
            std::string cell;
            std::getline(ss, cell, ',');
            row[h] = cell;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace detail

/// Human-readable summary assembled from the run artifacts. Re-rendering a
/// run directory always produces identical text.
inline std::string render_report(const std::filesystem::path& run_dir) {
    namespace fs = std::filesystem;
    std::ostringstream os;
    const auto manifest = spec::load_json_file((run_dir / "manifest.json").string());
    os << manifest["version"].get<std::string>() << " run report\n";
    os << "regime: " << manifest["analysis"]["resolved_regime"].get<std::string>() << "\n";
    if (manifest.contains("richardson")) {
        os << "richardson pilot: rel change " << fmt_double(manifest["richardson"]["rel_change"].get<double>())
           << (manifest["richardson"]["ok"].get<bool>() ? " (ok)" : " (step too coarse)") << "\n";
    }
    os << "\n";

    const auto msd = detail::read_csv(run_dir / "msd.csv");
    std::map<std::string, std::map<std::string, std::string>> scales_by_t;
    if (fs::exists(run_dir / "scales.csv"))
        for (auto& r : detail::read_csv(run_dir / "scales.csv")) scales_by_t[r["t"]] = r;
    std::map<std::string, std::map<std::string, std::string>> d22_by_p;
    if (fs::exists(run_dir / "diffusivity.csv"))
        for (auto& r : detail::read_csv(run_dir / "diffusivity.csv")) d22_by_p[r["p"]] = r;

    os << "      t            MSD        stderr     MSD/t    n_ef  p(t)   d22(n_ef~)  ratio\n";
    for (const auto& r : msd) {
        const double t = std::stod(r.at("t"));
        const double m = std::stod(r.at("msd"));
        const double se = std::stod(r.at("stderr"));
        os << fmt_fixed(t, 3) << "  " << fmt_double(m) << "  " << fmt_double(se) << "  "
           << fmt_fixed(m / t, 4);
        auto it = scales_by_t.find(r.at("t"));
        if (it != scales_by_t.end()) {
            const std::string nef = it->second["n_ef"];
            const std::string nef_simple = it->second["n_ef_simple"];
            const std::string p = it->second["p_of_t"];
            os << "  n_ef=" << (nef.empty() ? "-" : nef) << "/" << (nef_simple.empty() ? "-" : nef_simple)
               << "  p=" << (p.empty() ? "-" : p);
            // the perpetual-homogenization comparison: MSD/t against the
            // effective diffusivity of the already-homogenized scales
            if (!nef_simple.empty() && d22_by_p.count(nef_simple)) {
                const double d22 = std::stod(d22_by_p[nef_simple]["d22"]);
                os << "  d22=" << fmt_fixed(d22, 4) << "  msd/(t*d22)=" << fmt_fixed(m / t / d22, 4);
            }
        }
        os << "\n";
    }
    os << "\n";

    if (fs::exists(run_dir / "verdicts.csv")) {
        const auto verdicts = detail::read_csv(run_dir / "verdicts.csv");
        os << "verdicts:\n";
        int npass = 0, nfail = 0, nskip = 0;
        for (const auto& v : verdicts) {
            os << "  [" << v.at("verdict") << "] t=" << v.at("t") << " " << v.at("check") << " measured="
               << v.at("measured") << " in [" << v.at("lower") << ", " << v.at("upper") << "]";
            if (!v.at("note").empty()) os << "  (" << v.at("note") << ")";
            os << "\n";
            const std::string& verdict = v.at("verdict");
            if (verdict == "PASS") ++npass;
            else if (verdict == "FAIL") ++nfail;
            else ++nskip;
        }
        os << "summary: " << npass << " PASS, " << nfail << " FAIL, " << nskip << " SKIPPED\n";
    }
    return os.str();
}

}  // namespace shearflow
