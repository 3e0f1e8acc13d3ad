// Command-line front end: reproducible desk experiments over the circle-average
// machinery, emitting CSV tables plus a JSON manifest per run.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hypcircle/equi_stats.hpp"
#include "hypcircle/experiment_io.hpp"
#include "hypcircle/lattice_count.hpp"
#include "hypcircle/rng.hpp"
#include "hypcircle/spectral.hpp"

using namespace hypcircle;

namespace {

struct CommonOpts {
    std::string group = "triangle:2,3,7";
    std::string observable = "surface-bump:width=0.15";
    std::string theta = "4pi";
    double tol = 1e-8;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out = "out";
};

double parse_theta(const std::string& s) {
    if (s == "pi") return pi;
    if (s == "2pi") return 2.0 * pi;
    if (s == "4pi") return full_circle;
    return std::stod(s);
}

cplx parse_nu(const std::string& s) {
    if (!s.empty() && s.back() == 'i') {
        const std::string head = s.substr(0, s.size() - 1);
        return cplx(0.0, head.empty() ? 1.0 : std::stod(head));
    }
    return cplx(std::stod(s), 0.0);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

// "a:b:n" linspace or a comma list
std::vector<double> parse_grid(const std::string& s) {
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) throw CLI::ValidationError("grid", "expected a:b:n");
        const double a = std::stod(parts[0]), b = std::stod(parts[1]);
        const int n = std::stoi(parts[2]);
        std::vector<double> out;
        for (int i = 0; i < n; ++i)
            out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1.0));
        return out;
    }
    std::vector<double> out;
    for (const auto& p : split(s, ',')) out.push_back(std::stod(p));
    return out;
}

Observable make_observable(const std::string& spec, const FuchsianGroup& G) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    double width = 0.15;
    int pow_ = 4;
    std::string center = "deep";
    cplx nu = 0.5;
    if (colon != std::string::npos) {
        for (const auto& kv : split(spec.substr(colon + 1), ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("observable", "expected key=value: " + kv);
            const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "width") width = std::stod(val);
            else if (key == "pow") pow_ = std::stoi(val);
            else if (key == "center") center = val;
            else if (key == "nu") nu = parse_nu(val);
            else throw CLI::ValidationError("observable", "unknown key " + key);
        }
    }
    const HPoint c = center == "cone" ? point_i() : G.deep_point;
    if (kind == "surface-bump") return surface_bump(G, c, width, pow_);
    if (kind == "group-bump")
        return gamma_bump(G, iwasawa(c.x, c.y, 0.9), width, pow_);
    if (kind == "eigen") return model_eigenfunction(nu);
    if (kind == "const") {
        Observable one;
        one.gamma_invariant = true;
        one.eval_fn = [](const SL2&) { return cplx(1.0); };
        return one;
    }
    throw CLI::ValidationError("observable", "unknown kind " + kind);
}

struct RunContext {
    CommonOpts common;
    Manifest manifest;
    std::chrono::steady_clock::time_point started;

    explicit RunContext(const CommonOpts& co)
        : common(co),
          manifest((std::filesystem::create_directories(co.out),
                    (std::filesystem::path(co.out) / "manifest.json").string())),
          started(std::chrono::steady_clock::now()) {
        manifest.config()["group"] = co.group;
        manifest.config()["observable"] = co.observable;
        manifest.config()["theta"] = co.theta;
        manifest.config()["tol"] = co.tol;
        manifest.config()["seed"] = co.seed;
        manifest.config()["workers"] = co.workers;
    }

    std::string csv_path(const std::string& name) const {
        return (std::filesystem::path(common.out) / name).string();
    }

    int finish() {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        manifest.write(wall);
        if (!manifest.all_passed()) {
            std::cerr << "some checks FAILED; see manifest\n";
            return 1;
        }
        return 0;
    }
};

int run_ode_check(RunContext& ctx, const std::string& nus, const std::string& thetas,
                  const std::string& tgrid, double max_residual) {
    CsvWriter csv(ctx.csv_path("ode_check.csv"),
                  {"nu_re", "nu_im", "theta", "t", "residual"});
    const SL2 p = iwasawa(0.21, 1.13, 0.7);
    double worst = 0.0;
    for (const auto& nu_s : split(nus, ',')) {
        const cplx nu = parse_nu(nu_s);
        const auto f = model_eigenfunction(nu);
        const double mu = ((1.0 - nu * nu) / 4.0).real();
        for (const auto& th_s : split(thetas, ';')) {
            const double theta = parse_theta(th_s);
            const auto params = SpectralParams::from_nu(nu, 0, theta);
            for (double t : parse_grid(tgrid)) {
                const auto kd = k_theta_derivatives(f, p, theta, t, ctx.common.tol);
                const cplx g = g_coefficient(f, p, params, t, ctx.common.tol);
                const double resid = std::abs(kd.k2.value + kd.k1.value +
                                              mu * kd.k.value - std::exp(-t) * g);
                worst = std::max(worst, resid);
                csv.row({nu.real(), nu.imag(), theta, t, resid});
                std::cerr << "ode-check nu=" << nu_s << " theta=" << th_s << " t=" << t
                          << " resid=" << resid << "\n";
            }
        }
    }
    csv.close();
    ctx.manifest.add_check("ode_residual", worst <= max_residual,
                           "sup residual " + CsvWriter::format(worst));
    return ctx.finish();
}

int run_expand(RunContext& ctx, const std::string& nus, double slope_max) {
    CsvWriter csv(ctx.csv_path("expand.csv"),
                  {"nu_re", "nu_im", "theta", "a_plus_re", "a_minus_re", "d_plus_re",
                   "d_minus_re", "tail", "slope"});
    const SL2 p = iwasawa(0.21, 1.13, 0.7);
    const double theta = parse_theta(ctx.common.theta);
    bool all_ok = true;
    for (const auto& nu_s : split(nus, ',')) {
        const cplx nu = parse_nu(nu_s);
        const auto f = model_eigenfunction(nu);
        const auto params = SpectralParams::from_nu(nu, 0, theta);
        const auto co = compute_coefficients(f, p, params, ctx.common.tol);
        std::vector<double> xs, ys;
        double worst_rem = 0.0;
        for (double t = 3.0; t <= 8.01; t += 0.5) {
            const cplx k = k_theta(f, p, theta, t, 0.01 * ctx.common.tol).value;
            cplx rem = k - expansion_eval(co, t);
            if (co.mu_case == MuCase::quarter) rem /= (t + 1.0);
            worst_rem = std::max(worst_rem, std::abs(rem));
            if (std::abs(rem) > 1e-9) {
                xs.push_back(t);
                ys.push_back(std::log(std::abs(rem)));
            }
        }
        const bool below_floor = xs.size() < 6;
        const double slope = below_floor ? -1.0 : fit_line(xs, ys).slope;
        const bool ok = below_floor ? worst_rem <= 1e-9 : slope <= slope_max;
        all_ok = all_ok && ok;
        csv.row({nu.real(), nu.imag(), theta, co.a_plus.real(), co.a_minus.real(),
                 co.D_plus.real(), co.D_minus.real(), co.tail_bound, slope});
        std::cerr << "expand nu=" << nu_s << " slope=" << slope << (ok ? " ok" : " FAIL")
                  << "\n";
    }
    csv.close();
    ctx.manifest.add_check("remainder_decay", all_ok, "log-slope threshold " +
                                                          CsvWriter::format(slope_max));
    return ctx.finish();
}

int run_equidist(RunContext& ctx, const std::string& tgrid, double slope_max,
                 bool shrinking) {
    const auto G = group_from_preset(ctx.common.group);
    const auto f = make_observable(ctx.common.observable, G);
    const double theta = parse_theta(ctx.common.theta);
    const SL2 p = sample_quotient(G, 1, ctx.common.seed)[0];
    const double avg = unfolded_average(f);
    const auto grid = parse_grid(tgrid);

    CsvWriter csv(ctx.csv_path(shrinking ? "shrinking.csv" : "equidist.csv"),
                  {"t", "deviation"});
    std::vector<double> xs, ys;
    double first_dev = 0.0, last_dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        cplx val;
        if (shrinking) {
            auto t1 = [](double) { return 0.3; };
            auto t2 = [](double tt) { return 0.3 + tt * std::exp(-0.25 * tt); };
            val = shrinking_arc_average(f, p, t1, t2, t, ctx.common.tol);
        } else {
            val = k_theta(f, p, theta, t, ctx.common.tol).value;
        }
        const double dev = std::abs(val.real() - avg);
        if (i == 0) first_dev = dev;
        last_dev = dev;
        csv.row({t, dev});
        std::cerr << (shrinking ? "shrinking" : "equidist") << " t=" << t
                  << " dev=" << dev << "\n";
        if (dev > 1e-13) {
            xs.push_back(t);
            ys.push_back(std::log(dev));
        }
    }
    csv.close();
    ctx.manifest.add_check("deviation_shrinks", last_dev < first_dev,
                           CsvWriter::format(last_dev) + " < " +
                               CsvWriter::format(first_dev));
    if (!shrinking) {
        const double slope = xs.size() >= 3 ? fit_line(xs, ys).slope : -1.0;
        ctx.manifest.add_check("decay_slope", slope <= slope_max,
                               "slope " + CsvWriter::format(slope));
    }
    return ctx.finish();
}

int run_dlt(RunContext& ctx, const std::string& Tgrid, int n, const std::string& scaling_s,
            double max_ratio) {
    const auto G = group_from_preset(ctx.common.group);
    const auto f = make_observable(ctx.common.observable, G);
    const double theta = parse_theta(ctx.common.theta);
    DevScaling scaling = DevScaling::superquarter;
    double nu_f = 0.5;
    if (scaling_s == "quarter") scaling = DevScaling::quarter;
    else if (scaling_s.rfind("subquarter", 0) == 0) {
        scaling = DevScaling::subquarter;
        const auto eq = scaling_s.find('=');
        if (eq != std::string::npos) nu_f = std::stod(scaling_s.substr(eq + 1));
    }

    CsvWriter csv(ctx.csv_path("dlt.csv"),
                  {"T", "n", "max_abs", "q05", "median", "q95", "lp_prev"});
    std::vector<EmpiricalLaw> laws;
    std::vector<double> maxima;
    for (double T : parse_grid(Tgrid)) {
        const auto law = deviation_law(f, theta, T, n, ctx.common.seed, scaling, nu_f,
                                       ctx.common.tol, ctx.common.workers);
        const double lp = laws.empty() ? 0.0 : levy_prokhorov(laws.back(), law);
        const auto q = [&](double p_) {
            return law.samples[static_cast<std::size_t>(p_ * (law.samples.size() - 1))];
        };
        csv.row({T, static_cast<double>(n), law.max_abs(), q(0.05), q(0.5), q(0.95), lp});
        std::cerr << "dlt T=" << T << " max=" << law.max_abs() << " lp_prev=" << lp
                  << "\n";
        maxima.push_back(law.max_abs());
        laws.push_back(law);
    }
    csv.close();
    const double hi = *std::max_element(maxima.begin(), maxima.end());
    const double lo = *std::min_element(maxima.begin(), maxima.end());
    ctx.manifest.add_check("support_tightness", hi <= max_ratio * lo,
                           "max/min of empirical maxima " +
                               CsvWriter::format(hi / std::max(lo, 1e-300)));
    return ctx.finish();
}

int run_translate(RunContext& ctx, int count, double tmin, double tmax) {
    const auto G = group_from_preset(ctx.common.group);
    const auto f = make_observable(ctx.common.observable, G);
    const SL2 p = sample_quotient(G, 1, ctx.common.seed)[0];
    CsvWriter csv(ctx.csv_path("translate.csv"),
                  {"op_norm", "cartan_t", "direct_re", "cartan_re", "diff"});
    Rng rng(ctx.common.seed ^ 0xabcdefULL);
    bool all_ok = true;
    for (int k = 0; k < count; ++k) {
        const double t = rng.uniform(tmin, tmax);
        const SL2 g = rotation(rng.uniform(0.0, full_circle)) * exp_lie(lie_X, t) *
                      rotation(rng.uniform(0.0, full_circle));
        const auto lhs = translate_average(f, p, g, ctx.common.tol);
        const auto rhs = translate_average_cartan(f, p, g, ctx.common.tol);
        const double diff = std::abs(lhs.value - rhs.value);
        const bool ok =
            diff <= 2.0 * ctx.common.tol + 2.0 * (lhs.error_estimate + rhs.error_estimate);
        all_ok = all_ok && ok;
        csv.row({g.op_norm(), cartan(g).t, lhs.value.real(), rhs.value.real(), diff});
        if ((k & 15) == 0) std::cerr << "translate " << k << "/" << count << "\n";
    }
    csv.close();
    ctx.manifest.add_check("translate_identity", all_ok,
                           "2x quadrature tolerance " + CsvWriter::format(ctx.common.tol));
    return ctx.finish();
}

int run_count(RunContext& ctx, const std::string& rgrid, const std::string& base,
              double ratio_lo, double ratio_hi, double slope_cap,
              const std::string& sweep_etas) {
    const auto G = group_from_preset(ctx.common.group);
    const HPoint base_pt = base == "deep" ? G.deep_point : point_i();
    LatticeCounter counter(G, base_pt);
    const auto grid = parse_grid(rgrid);
    CsvWriter csv(ctx.csv_path("count.csv"), {"R", "N", "Sigma", "E", "ratio"});
    auto reports = counter.count_grid(grid);
    bool all_valid = true;
    for (const auto& rep : reports) {
        all_valid = all_valid && rep.valid;
        csv.row({rep.R, static_cast<double>(rep.N), rep.Sigma, rep.E,
                 rep.N / std::max(rep.Sigma, 1e-300)});
        std::cerr << "count R=" << rep.R << " N=" << rep.N << " Sigma=" << rep.Sigma
                  << "\n";
    }
    csv.close();
    ctx.manifest.set_partial(!all_valid);
    const auto& top = reports.back();
    const double ratio = top.N / top.Sigma;
    ctx.manifest.add_check("enumeration_valid", all_valid, "");
    ctx.manifest.add_check("ratio_near_one", ratio >= ratio_lo && ratio <= ratio_hi,
                           "N/Sigma at R=" + CsvWriter::format(top.R) + " is " +
                               CsvWriter::format(ratio));
    if (reports.size() >= 3) {
        const double slope = error_exponent(reports).slope;
        ctx.manifest.add_check("error_exponent", slope <= slope_cap,
                               "slope " + CsvWriter::format(slope));
    }
    if (!sweep_etas.empty()) {
        const auto table = mollifier_sweep(counter, parse_grid(sweep_etas), grid, 800,
                                           ctx.common.seed, ctx.common.workers);
        CsvWriter sweep_csv(ctx.csv_path("mollifier_sweep.csv"),
                            {"eta", "slope", "worst_total"});
        double best_eta = table.front().eta, best_slope = 1e300;
        for (const auto& row : table) {
            sweep_csv.row({row.eta, row.slope, row.worst_total});
            if (row.slope < best_slope) {
                best_slope = row.slope;
                best_eta = row.eta;
            }
        }
        sweep_csv.close();
        ctx.manifest.config()["best_eta"] = best_eta;
    }
    return ctx.finish();
}

int run_avg_count(RunContext& ctx, const std::string& rgrid, int n) {
    const auto G = group_from_preset(ctx.common.group);
    const auto psi = make_observable(ctx.common.observable, G);
    LatticeCounter counter(G, point_i());
    CsvWriter csv(ctx.csv_path("avg_count.csv"),
                  {"R", "monte_carlo", "mc_stderr", "unfolded", "unfolded_err"});
    bool all_ok = true;
    for (double R : parse_grid(rgrid)) {
        const auto avg = averaged_count(counter, psi, R, ctx.common.tol, n,
                                        ctx.common.seed, ctx.common.workers);
        all_ok = all_ok && avg.consistent;
        csv.row({R, avg.monte_carlo, avg.mc_stderr, avg.unfolded, avg.unfolded_err});
        std::cerr << "avg-count R=" << R << " mc=" << avg.monte_carlo
                  << " unfolded=" << avg.unfolded << "\n";
    }
    csv.close();
    ctx.manifest.add_check("routes_agree", all_ok, "within combined error bars");
    return ctx.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circle-average experiments on compact hyperbolic surfaces"};
    app.require_subcommand(1);
    app.fallthrough();
    CommonOpts co;
    app.add_option("--group", co.group, "group preset or file");
    app.add_option("--observable", co.observable, "observable spec");
    app.add_option("--theta", co.theta, "arc length (pi, 2pi, 4pi or a number)");
    app.add_option("--tol", co.tol, "quadrature tolerance");
    app.add_option("--seed", co.seed, "master seed");
    app.add_option("--workers", co.workers, "worker threads (results are identical)");
    app.add_option("--out", co.out, "output directory");

    std::string nus = "1,0.9,0.5,0.2,i,2i", thetas = "pi;4pi", tgrid = "1:6:11";
    double max_residual = 1e-6;
    auto* ode = app.add_subcommand("ode-check", "ODE residual suite");
    ode->add_option("--nu", nus);
    ode->add_option("--thetas", thetas);
    ode->add_option("--t-grid", tgrid);
    ode->add_option("--max-residual", max_residual);

    std::string exp_nus = "1,0.9,0.5,0.2,i,2i";
    double exp_slope = -0.9;
    auto* expand = app.add_subcommand("expand", "coefficients and remainder decay");
    expand->add_option("--nu", exp_nus);
    expand->add_option("--slope-max", exp_slope);

    std::string eq_grid = "3:7:9";
    double eq_slope = -0.2;
    bool shrinking = false;
    auto* equidist = app.add_subcommand("equidist", "equidistribution rate fitting");
    equidist->add_option("--t-grid", eq_grid);
    equidist->add_option("--slope-max", eq_slope);
    equidist->add_flag("--shrinking", shrinking, "shrinking-arc windows");

    std::string Tgrid = "4,6,8", scaling = "superquarter";
    int dlt_n = 200;
    double max_ratio = 2.0;
    auto* dlt = app.add_subcommand("dlt", "deviation laws and LP distances");
    dlt->add_option("--T-grid", Tgrid);
    dlt->add_option("--n", dlt_n);
    dlt->add_option("--scaling", scaling);
    dlt->add_option("--max-ratio", max_ratio);

    int tr_count = 20;
    double tr_tmin = 1.0, tr_tmax = 5.0;
    auto* translate = app.add_subcommand("translate", "Cartan translate identity");
    translate->add_option("--count", tr_count);
    translate->add_option("--t-min", tr_tmin);
    translate->add_option("--t-max", tr_tmax);

    std::string rgrid = "6:11:11", base = "cone", sweep_etas;
    double ratio_lo = 0.85, ratio_hi = 1.15, slope_cap = 0.98;
    auto* count_cmd = app.add_subcommand("count", "lattice point counting");
    count_cmd->add_option("--r-grid", rgrid);
    count_cmd->add_option("--base", base)->check(CLI::IsMember({"cone", "deep"}));
    count_cmd->add_option("--ratio-lo", ratio_lo);
    count_cmd->add_option("--ratio-hi", ratio_hi);
    count_cmd->add_option("--slope-cap", slope_cap);
    count_cmd->add_option("--mollifier-sweep", sweep_etas, "eta grid to sweep");

    std::string avg_rgrid = "2,4,6";
    int avg_n = 4000;
    auto* avg = app.add_subcommand("avg-count", "averaged counting, two routes");
    avg->add_option("--r-grid", avg_rgrid);
    avg->add_option("--n", avg_n);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help() << "\nparse error: " << e.what() << "\n";
        return 2;
    }

    try {
        RunContext ctx(co);
        if (*ode) return run_ode_check(ctx, nus, thetas, tgrid, max_residual);
        if (*expand) return run_expand(ctx, exp_nus, exp_slope);
        if (*equidist) return run_equidist(ctx, eq_grid, eq_slope, shrinking);
        if (*dlt) return run_dlt(ctx, Tgrid, dlt_n, scaling, max_ratio);
        if (*translate) return run_translate(ctx, tr_count, tr_tmin, tr_tmax);
        if (*count_cmd)
            return run_count(ctx, rgrid, base, ratio_lo, ratio_hi, slope_cap, sweep_etas);
        if (*avg) return run_avg_count(ctx, avg_rgrid, avg_n);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        try {
            Manifest m((std::filesystem::path(co.out) / "manifest.json").string());
            m.set_partial(true);
            m.add_check("run_completed", false, e.what());
            m.write(0.0);
        } catch (...) {
        }
        return 1;
    }
    return 2;
}
