// Command-line front door: validate / diffusivity / simulate / mixing /
// exponent / report. Exit codes: 0 all PASS or SKIPPED, 2 any FAIL,
// 1 execution error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "shearflow/mixing.hpp"
#include "shearflow/runner.hpp"

namespace fs = std::filesystem;
using namespace shearflow;

namespace {

int cmd_validate(const std::string& config_path) {
    const auto j = spec::load_json_file(config_path);
    const MultiscaleField field =
        j.contains("field") ? spec::parse_field(j.at("field")) : spec::parse_field(j);
    const HypothesisReport rep = validate_hypotheses(field);
    const ScaleLadder& lad = field.ladder;
    std::cout << "scales: P=" << field.top_scale() << "\n";
    std::cout << "rho_min=" << lad.rho_min << " rho_max=" << lad.rho_max << " gamma_min=" << lad.gamma_min
              << " gamma_max=" << lad.gamma_max << "\n";
    std::cout << "K0=" << field.k0 << " K1=" << field.k1 << " K2=" << field.k2 << "\n";
    std::cout << "hypothesis1=" << (rep.h1_holds ? "holds" : "fails")
              << " hypothesis2=" << (rep.h2_holds ? "holds" : "fails") << " epsilon=" << rep.epsilon
              << "\n";
    if (rep.h1_holds) std::cout << "envelope |h(x)| <= " << rep.bound_h1 << " |x|\n";
    if (rep.h2_holds) std::cout << "envelope |h(x)| <= " << rep.bound_h2 << " x^2\n";
    for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
    return 0;
}

int cmd_diffusivity(const std::string& config_path, const std::string& out) {
    const auto j = spec::load_json_file(config_path);
    const MultiscaleField field =
        j.contains("field") ? spec::parse_field(j.at("field")) : spec::parse_field(j);
    const std::string csv = diffusivity_csv(field);
    if (out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + out);
        f << csv;
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, int threads,
                 std::optional<std::uint64_t> seed_override) {
    auto cfg = spec::parse_experiment(spec::load_json_file(config_path));
    if (seed_override) cfg.sim.seed = *seed_override;
    const RunRecord rec = run_experiment(cfg, fs::path(out_dir), threads);
    std::cout << "run dir: " << rec.dir.string() << "\n";
    std::cout << "verdicts: " << rec.n_pass << " PASS, " << rec.n_fail << " FAIL, " << rec.n_skipped
              << " SKIPPED\n";
    if (rec.richardson_ran && !rec.richardson_ok)
        std::cout << "warning: Richardson pilot rel change " << rec.richardson_rel_change
                  << " >= 0.5% (see manifest)\n";
    return rec.exit_code;
}

int cmd_mixing(const std::string& f_path, const std::string& g_path, double r, double t, double R,
               std::int64_t mc_paths, int mc_steps, std::uint64_t seed) {
    MixingProblem prob;
    prob.f = spec::parse_mean_zero_profile(spec::load_json_file(f_path));
    prob.g = spec::parse_mean_zero_profile(spec::load_json_file(g_path));
    prob.r = r;
    prob.t = t;
    prob.period = R;
    const MixingResult res = mixing_functional(prob);
    std::cout << "value,bound,ratio,mc_estimate,mc_stderr\n";
    std::cout << fmt_double(res.value) << ',' << fmt_double(res.bound) << ','
              << fmt_double(res.bound > 0.0 ? std::abs(res.value) / res.bound : 0.0);
    if (mc_paths > 0) {
        const auto mc = mc_mixing_estimate(prob, mc_paths, mc_steps, seed);
        std::cout << ',' << fmt_double(mc.estimate) << ',' << fmt_double(mc.stderror);
    } else {
        std::cout << ",,";
    }
    std::cout << "\n";
    return 0;
}

int cmd_exponent(const std::string& msd_path, int window) {
    std::ifstream in(msd_path);
    if (!in) throw std::runtime_error("cannot open " + msd_path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> t, msd, err;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double tv, mv, ev;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &tv, &mv, &ev) != 3)
            throw std::runtime_error("malformed msd.csv row: " + line);
        t.push_back(tv);
        msd.push_back(mv);
        err.push_back(ev);
    }
    const ExponentFit fit = fit_exponent(t, msd, err, window);
    std::cout << "t,nu_pointwise,nu_pointwise_stderr,nu_windowed,nu_windowed_stderr\n";
    for (const auto& r : fit.rows) {
        std::cout << fmt_double(r.t) << ',';
        if (r.nu_pointwise) std::cout << fmt_double(*r.nu_pointwise) << ',' << fmt_double(r.nu_pointwise_stderr);
        else std::cout << ',';
        std::cout << ',';
        if (r.nu_windowed) std::cout << fmt_double(*r.nu_windowed) << ',' << fmt_double(r.nu_windowed_stderr);
        else std::cout << ',';
        std::cout << '\n';
    }
    return 0;
}

int cmd_report(const std::string& run_dir) {
    const std::string text = render_report(fs::path(run_dir));
    std::cout << text;
    // exit code mirrors the persisted verdicts
    const auto rows = detail::read_csv(fs::path(run_dir) / "verdicts.csv");
    for (const auto& r : rows)
        if (r.at("verdict") == "FAIL") return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiscale shear-flow diffusion: exact homogenization brackets + reproducible Monte Carlo"};
    app.require_subcommand(1);

    std::string config_path, out, run_dir, f_path, g_path, msd_path;
    int threads = 1;
    int window = 4;
    double r = 2.0, t = 1.0, R = 1.0;
    std::int64_t mc_paths = 0;
    int mc_steps = 256;
    std::uint64_t seed = 1;
    bool have_seed_override = false;

    auto* validate = app.add_subcommand("validate", "check a field spec against the model hypotheses");
    validate->add_option("--config", config_path, "field or experiment config (JSON)")->required();

    auto* diffusivity = app.add_subcommand("diffusivity", "exact d22 and theorem brackets per scale (CSV)");
    diffusivity->add_option("--config", config_path)->required();
    diffusivity->add_option("--out", out, "output CSV path (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "run the full experiment into a run directory");
    simulate->add_option("--config", config_path)->required();
    simulate->add_option("--out", out, "run directory")->required();
    simulate->add_option("--threads", threads, "worker threads (wall time only, never results)");
    auto* seed_opt = simulate->add_option("--seed", seed, "override the config seed");

    auto* mixing = app.add_subcommand("mixing", "exact mixing functional and Prop-3.3 bound");
    mixing->add_option("--f", f_path, "profile spec for f (JSON, mean-zero)")->required();
    mixing->add_option("--g", g_path, "profile spec for G (JSON, mean-zero)")->required();
    mixing->add_option("--r", r)->required();
    mixing->add_option("--t", t)->required();
    mixing->add_option("--R", R, "period (default 1)");
    mixing->add_option("--mc", mc_paths, "Monte Carlo cross-check paths");
    mixing->add_option("--steps", mc_steps, "Monte Carlo time steps");
    mixing->add_option("--seed", seed);

    auto* exponent = app.add_subcommand("exponent", "fit nu(t) from an msd.csv");
    exponent->add_option("--msd", msd_path)->required();
    exponent->add_option("--window", window, "sliding-window size (>= 4)");

    auto* report = app.add_subcommand("report", "re-render the summary of a finished run");
    report->add_option("--run", run_dir)->required();

    CLI11_PARSE(app, argc, argv);
    have_seed_override = seed_opt->count() > 0;

    try {
        if (*validate) return cmd_validate(config_path);
        if (*diffusivity) return cmd_diffusivity(config_path, out);
        if (*simulate)
            return cmd_simulate(config_path, out, threads,
                                have_seed_override ? std::optional<std::uint64_t>(seed) : std::nullopt);
        if (*mixing) return cmd_mixing(f_path, g_path, r, t, R, mc_paths, mc_steps, seed);
        if (*exponent) return cmd_exponent(msd_path, window);
        if (*report) return cmd_report(run_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
