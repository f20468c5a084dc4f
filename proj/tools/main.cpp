#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "todamt/analysis.hpp"
#include "todamt/parallel.hpp"
#include "todamt/testfns.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace todamt;
using namespace todamt::cli;
using std::numbers::pi;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Check {
    std::string name;
    double measured = 0.0;
    std::string expected;
    bool pass = false;
};

class Run {
public:
    Run(std::string command, const Experiment& exp, fs::path dir)
        : command_(std::move(command)), dir_(std::move(dir)), hash_(exp.config.hash()) {
        fs::create_directories(dir_);
        manifest_["command"] = command_;
        manifest_["artifact_version"] = kVersion;
        manifest_["config"] = exp.config.to_json();
        manifest_["config_hash"] = hash_;
        manifest_["critical_rho"] = {exp.critical[0], exp.critical[1]};
        manifest_["rho"] = {exp.rho[0], exp.rho[1]};
        manifest_["started"] = utc_now();
    }

    fs::path file(const std::string& stem, const std::string& ext) const { return dir_ / (stem + "_" + hash_ + ext); }

    /// Writes a CSV and records it in the manifest.
    void csv(const std::string& stem, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) {
        const fs::path p = file(stem, ".csv");
        std::ofstream out(p);
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
            out << "\n";
        }
        if (!out) throw std::runtime_error("cannot write " + p.string());
        manifest_["outputs"].push_back(p.filename().string());
    }

    void plot(const std::string& body) {
        const fs::path p = file("plot_" + command_, ".gp");
        std::ofstream out(p);
        out << "set datafile separator ','\nset key autotitle columnheader\nset terminal pngcairo size 900,600\n"
            << "set output '" << file("plot_" + command_, ".png").filename().string() << "'\n"
            << body;
        manifest_["outputs"].push_back(p.filename().string());
    }

    void check(const std::string& name, double measured, const std::string& expected, bool pass) {
        checks_.push_back({name, measured, expected, pass});
    }

    json& results() { return manifest_["results"]; }

    /// Writes the manifest, prints failed checks, returns the exit status.
    int finish() {
        json cj = json::array();
        bool ok = true;
        for (const Check& c : checks_) {
            cj.push_back({{"name", c.name}, {"measured", c.measured}, {"expected", c.expected}, {"pass", c.pass}});
            if (!c.pass) {
                ok = false;
                std::cerr << "check failed: " << c.name << ": measured " << num(c.measured) << ", expected "
                          << c.expected << "\n";
            }
        }
        manifest_["checks"] = cj;
        manifest_["finished"] = utc_now();
        const fs::path p = file("manifest_" + command_, ".json");
        std::ofstream(p) << manifest_.dump(2) << "\n";
        std::cout << command_ << ": " << checks_.size() << " checks, " << (ok ? "all passed" : "FAILURES") << "; manifest "
                  << p.string() << "\n";
        return ok ? 0 : 1;
    }

private:
    std::string command_;
    fs::path dir_;
    std::string hash_;
    json manifest_;
    std::vector<Check> checks_;
};

StatePair initial_state(const Experiment& e) {
    switch (e.config.init) {
        case InitKind::random: return random_smooth_state(e.grid, e.config.seed);
        case InitKind::bubble:
            return toda_bubble_pair(e.grid, default_bubble_center(e.grid, e.singular), e.config.bubble_lambda,
                                    tilde_alpha(e.singular, 0));
        case InitKind::zero: break;
    }
    const Field zero = Field::constant(e.grid.size(), 0.0);
    return {zero, zero};
}

std::string fixed(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

// ---------------------------------------------------------------------------

int run_verify(const Experiment& e, Run& run, int threads) {
    const SurfaceGrid& g = e.grid;
    const WeightPair w = e.weights();
    std::vector<std::function<std::vector<Check>()>> groups;

    groups.push_back([&] {
        const StatePair u = random_smooth_state(g, e.config.seed);
        const FieldPair grad = grad_j_rho(g, u, w, e.rho);
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 5; ++k) {
            const StatePair d = random_smooth_state(g, e.config.seed + 1000 + k, 1.0);
            const double eps = 1e-5;
            const double fd = (j_rho(g, {axpy(u.u1, eps, d.u1), axpy(u.u2, eps, d.u2)}, w, e.rho).total -
                               j_rho(g, {axpy(u.u1, -eps, d.u1), axpy(u.u2, -eps, d.u2)}, w, e.rho).total) /
                              (2 * eps);
            std::vector<double> v(g.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = grad.first[i] * d.u1[i] + grad.second[i] * d.u2[i];
            worst = std::max(worst, std::abs(stable_sum(v) * g.quadrature_weight() - fd) / std::abs(fd));
        }
        return std::vector<Check>{{"gradient vs central differences (relative)", worst, "< 1e-5", worst < 1e-5}};
    });

    groups.push_back([&] {
        const StatePair u = random_smooth_state(g, e.config.seed + 1, 3.0);
        const double j0 = j_rho(g, u, w, e.rho).total;
        std::mt19937_64 rng(e.config.seed);
        std::uniform_real_distribution<double> c(-10.0, 10.0);
        double worst = 0.0;
        for (int t = 0; t < 10; ++t)
            worst = std::max(worst, std::abs(j_rho(g, {u.u1.shifted(c(rng)), u.u2.shifted(c(rng))}, w, e.rho).total - j0) /
                                        (1 + std::abs(j0)));
        std::vector<Check> out{{"gauge invariance |dJ|/(1+|J|)", worst, "< 1e-9", worst < 1e-9}};

        const FunctionalEvaluation ev = evaluate_functional(g, u, w, e.rho);
        const FieldPair c2 = apply_cartan(ev.gradient);
        const double diff = std::max((c2.first - ev.residual.first).max_abs(), (c2.second - ev.residual.second).max_abs());
        const double scale = 1.0 + std::max(ev.residual.first.max_abs(), ev.residual.second.max_abs());
        out.push_back({"Euler-Lagrange residual equals Cartan(gradient)", diff / scale, "< 1e-10", diff / scale < 1e-10});

        const StatePair d = random_smooth_state(g, e.config.seed + 2, 1.0);
        const EnergyIncrement inc(g, u, {d.u1, d.u2}, w, e.rho);
        const double direct = j_rho(g, {axpy(u.u1, 0.5, d.u1), axpy(u.u2, 0.5, d.u2)}, w, e.rho).total - j0;
        const double err = std::abs(inc(0.5) - direct) / (1 + std::abs(direct));
        out.push_back({"energy increment vs direct difference", err, "< 1e-9", err < 1e-9});
        return out;
    });

    groups.push_back([&] {
        std::vector<Point> pts = e.singular.points();
        if (pts.empty()) pts.push_back(g.node(g.node_index(g.n() / 2, g.n() / 2)));
        std::vector<Check> out;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const Field G = green_function(g, pts[j]);
            const Spectrum s = g.forward(G);
            double worst = 0.0;
            for (int r = 0; r < g.n(); ++r)
                for (int kx = 0; kx <= g.n() / 2; ++kx)
                    worst = std::max(worst, std::abs(s[static_cast<std::size_t>(r) * g.spectrum_columns() + kx] -
                                                     green_coefficient(g, pts[j], kx, g.row_frequency(r))));
            const std::string tag = " at point " + std::to_string(j + 1);
            out.push_back({"Green coefficient identity" + tag, worst, "<= 1e-12", worst <= 1e-12});
            out.push_back({"Green mean" + tag, std::abs(G.mean()), "<= 1e-12", std::abs(G.mean()) <= 1e-12});
            const double slope = shell_log_fit(g, G, pts[j], 4 * g.spacing(), 16 * g.spacing()).slope;
            const double rel = std::abs(slope * 2 * pi + 1);
            out.push_back({"Green shell slope relative error" + tag, rel, "< 0.05", rel < 0.05});
        }
        return out;
    });

    groups.push_back([&] {
        std::vector<Check> out;
        for (int i = 0; i < 2; ++i) {
            const WeightField& wf = i == 0 ? e.w1 : e.w2;
            std::vector<double> logs(g.size());
            for (std::size_t k = 0; k < g.size(); ++k) logs[k] = std::log(wf.values[k]);
            const Field lw(std::move(logs));
            for (std::size_t j = 0; j < e.singular.size(); ++j) {
                const double a = e.singular.alpha(i, j);
                if (a == 0.0) continue;
                const double slope = shell_log_fit(g, lw, e.singular.point(j), 4 * g.spacing(), 16 * g.spacing()).slope;
                const double rel = std::abs(slope / (2 * a) - 1);
                out.push_back({"weight " + std::to_string(i + 1) + " exponent at point " + std::to_string(j + 1) +
                                   " relative error",
                               rel, "< 0.05", rel < 0.05});
            }
        }
        return out;
    });

    groups.push_back([&] {
        std::vector<std::array<double, 2>> exps{{0.0, 0.0}};
        for (std::size_t j = 0; j < e.singular.size(); ++j) exps.push_back({e.singular.alpha(0, j), e.singular.alpha(1, j)});
        std::vector<Check> out;
        for (const auto& [a1, a2] : exps) {
            const auto roots = pohozaev_roots(a1, a2);
            const auto swapped = pohozaev_roots(a2, a1);
            double worst = 0.0;
            for (const auto& r : roots)
                worst = std::max(worst, std::abs(pohozaev_residual(r[0], r[1], a1, a2)) /
                                            std::max(1.0, r[0] * r[0] + r[1] * r[1] + 4 * pi * ((1 + a1) * r[0] + (1 + a2) * r[1])));
            bool symmetric = swapped.size() == roots.size();
            for (const auto& r : roots) {
                bool hit = false;
                for (const auto& s : swapped) hit = hit || (std::abs(s[0] - r[1]) < 1e-9 && std::abs(s[1] - r[0]) < 1e-9);
                symmetric = symmetric && hit;
            }
            const std::string tag = " for a = (" + fixed(a1) + ", " + fixed(a2) + ")";
            out.push_back({"Pohozaev root residual" + tag, worst, "< 1e-9", worst < 1e-9});
            out.push_back({"Pohozaev root swap symmetry" + tag, symmetric ? 1.0 : 0.0, "1", symmetric});
        }
        return out;
    });

    std::vector<std::vector<Check>> results(groups.size());
    parallel_for(groups.size(), threads, [&](std::size_t i) { results[i] = groups[i](); });
    std::vector<std::vector<std::string>> rows;
    for (const auto& group : results)
        for (const Check& c : group) {
            run.check(c.name, c.measured, c.expected, c.pass);
            rows.push_back({"\"" + c.name + "\"", num(c.measured), "\"" + c.expected + "\"", c.pass ? "1" : "0"});
        }
    run.csv("verify", {"check", "measured", "expected", "pass"}, rows);
    return run.finish();
}

int run_sweep(const Experiment& e, Run& run, int threads) {
    SweepOptions opts;
    opts.threads = threads;
    const SweepReport rep = lambda_sweep(e.grid, e.singular, e.weights(), e.rho, e.config.lambdas, opts);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.records)
        rows.push_back({num(r.lambda), num(r.q_energy), num(r.mean_u1), num(r.mean_u2), num(r.log_int_1),
                        num(r.log_int_2), num(r.j_rho)});
    run.csv("sweep", {"lambda", "q_energy", "mean_u1", "mean_u2", "log_int_1", "log_int_2", "j_rho"}, rows);

    const double a = 1 + rep.tilde_alpha;
    const double nan = std::nan("");
    const double j_target = 2 * a * (4 * pi * a - e.rho[0]);
    if (rep.fitted) {
        const std::vector<std::tuple<std::string, const LogFit*, double>> fits{
            {"q_energy", &rep.slopes.q_energy, 8 * pi * a * a}, {"mean_u1", &rep.slopes.mean_u1, -2 * a},
            {"mean_u2", &rep.slopes.mean_u2, nan},              {"log_int_1", &rep.slopes.log_int_1, nan},
            {"log_int_2", &rep.slopes.log_int_2, a},            {"j_rho", &rep.slopes.j_rho, j_target}};
        std::vector<std::vector<std::string>> srows;
        for (const auto& [name, fit, target] : fits)
            srows.push_back({name, num(fit->slope), num(fit->intercept), num(fit->residual), num(target)});
        run.csv("sweep_slopes", {"quantity", "slope", "intercept", "residual", "target"}, srows);
        if (j_target != 0.0)
            run.check("J slope sign matches 2(1+a~)(4pi(1+a~)-rho_1)", rep.slopes.j_rho.slope,
                      j_target < 0 ? "< 0" : "> 0", (rep.slopes.j_rho.slope < 0) == (j_target < 0));
        run.results()["j_slope"] = rep.slopes.j_rho.slope;
        run.results()["j_slope_target"] = j_target;
    }
    run.results()["center"] = {rep.center.x, rep.center.y};
    run.results()["tilde_alpha_1"] = rep.tilde_alpha;
    run.results()["fit_lambdas"] = rep.fit_lambdas;
    run.plot("set logscale x\nset xlabel 'lambda'\nplot '" + run.file("sweep", ".csv").filename().string() +
             "' using 1:7 with linespoints, '' using 1:2 with linespoints\n");
    return run.finish();
}

std::vector<std::string> concentration_row(double frac, const ConcentrationRecord& rec) {
    return {num(frac), std::to_string(rec.point_index), num(rec.radius), num(rec.sigma[0]), num(rec.sigma[1]),
            num(rec.pohozaev_residual)};
}

const std::vector<std::string> kConcentrationHeader{"rho_frac", "point_index", "radius", "sigma1", "sigma2",
                                                    "pohozaev_residual"};

json report_json(const MinimizeReport& r) {
    return {{"status", to_string(r.status)},     {"rho", {r.rho[0], r.rho[1]}},
            {"j_rho", r.energy.total},            {"initial_j_rho", r.initial_energy},
            {"grad_norm", r.grad_norm},           {"el_residual", r.el_residual},
            {"iterations", r.iterations},         {"max_abs_u", r.state.max_abs()},
            {"suspicious_decrease", r.suspicious_decrease}, {"line_search_failed", r.line_search_failed}};
}

int run_minimize(const Experiment& e, Run& run) {
    const MinimizeReport r =
        minimize_j(e.grid, e.weights(), e.rho, initial_state(e), e.config.minimize, probe_points(e.singular));
    std::vector<std::vector<std::string>> rows;
    for (const auto& h : r.history)
        rows.push_back({std::to_string(h.iter), num(h.j_rho), num(h.grad_norm), num(h.max_u1), num(h.max_u2)});
    run.csv("minimize", {"iter", "j_rho", "grad_norm", "max_u1", "max_u2"}, rows);
    std::vector<std::vector<std::string>> crows;
    for (const auto& rec : r.concentration.records) crows.push_back(concentration_row(e.rho[0] / e.critical[0], rec));
    run.csv("concentration", kConcentrationHeader, crows);
    run.results() = report_json(r);
    if (e.rho[0] <= e.critical[0] * (1 + 1e-12) && e.rho[1] <= e.critical[1] * (1 + 1e-12))
        run.check("status at rho <= critical is not diverged-suspected",
                  r.status == MinimizeStatus::diverged_suspected ? 1.0 : 0.0, "0",
                  r.status != MinimizeStatus::diverged_suspected);
    run.plot("set logscale y\nset xlabel 'iteration'\nplot '" + run.file("minimize", ".csv").filename().string() +
             "' using 1:3 with lines\n");
    std::cout << "status " << to_string(r.status) << ", J = " << num(r.energy.total) << ", " << r.iterations
              << " iterations\n";
    return run.finish();
}

int run_continuation(const Experiment& e, Run& run) {
    std::vector<RhoParams> path;
    for (double f : e.config.path) path.push_back(e.rho_at(f));
    const auto reports = continuation(e.grid, e.singular, e.weights(), path, initial_state(e), e.config.minimize);

    std::vector<std::vector<std::string>> rows, crows;
    json steps = json::array();
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const MinimizeReport& r = reports[k];
        const double frac = e.config.path[k];
        rows.push_back({std::to_string(k), num(frac), num(r.rho[0]), num(r.rho[1]), to_string(r.status),
                        std::to_string(r.iterations), num(r.energy.total), num(r.grad_norm), num(r.el_residual),
                        num(r.state.u1.max_abs()), num(r.state.u2.max_abs())});
        for (const auto& rec : r.concentration.records) crows.push_back(concentration_row(frac, rec));
        steps.push_back(report_json(r));
        run.check("step " + std::to_string(k) + " at rho <= critical is not diverged-suspected",
                  r.status == MinimizeStatus::diverged_suspected ? 1.0 : 0.0, "0",
                  r.status != MinimizeStatus::diverged_suspected);
    }
    run.csv("continuation",
            {"step", "rho_frac", "rho1", "rho2", "status", "iterations", "j_rho", "grad_norm", "el_residual", "max_u1",
             "max_u2"},
            rows);
    run.csv("continuation_concentration", kConcentrationHeader, crows);
    run.results()["steps"] = steps;

    if (reports.size() >= 2) {
        const BlowupScenario s = classify_blowup(reports, e.singular);
        json points = json::array();
        for (const auto& p : s.points) points.push_back(p ? json{p->x, p->y} : json(nullptr));
        run.results()["blowup"] = {{"tag", to_string(s.tag)},
                                   {"component", s.component + 1},
                                   {"points", points},
                                   {"alpha_consistent", s.alpha_consistent},
                                   {"evidence", s.evidence},
                                   {"state_bound", s.options.state_bound},
                                   {"mass_fraction", s.options.mass_fraction},
                                   {"radius", s.options.radius}};
        if (s.tag == BlowupTag::single_component || s.tag == BlowupTag::two_point) {
            json residuals = json::array();
            const double exclusion = std::max(0.05, 4 * e.grid.spacing());
            for (const auto& r : reports) {
                const auto res = limit_profile_residual(e.grid, r.state, e.singular, s.points, exclusion, e.weights());
                residuals.push_back({res[0], res[1]});
            }
            run.results()["limit_profile_residual"] = residuals;
        }
    }
    run.plot("set xlabel 'rho / critical'\nplot '" + run.file("continuation", ".csv").filename().string() +
             "' using 2:7 with linespoints\n");
    return run.finish();
}

int run_pohozaev(const Experiment& e, Run& run) {
    std::vector<std::array<double, 2>> exps{{0.0, 0.0}};
    for (std::size_t j = 0; j < e.singular.size(); ++j) exps.push_back({e.singular.alpha(0, j), e.singular.alpha(1, j)});
    std::vector<std::vector<std::string>> rows;
    for (const auto& [a1, a2] : exps) {
        for (const auto& r : pohozaev_roots(a1, a2)) {
            const double res = pohozaev_residual(r[0], r[1], a1, a2);
            const double scale = std::max(1.0, r[0] * r[0] + r[1] * r[1] + 4 * pi * ((1 + a1) * r[0] + (1 + a2) * r[1]));
            rows.push_back({num(a1), num(a2), num(r[0]), num(r[1]), num(res)});
            run.check("relative residual at (" + fixed(r[0]) + ", " + fixed(r[1]) + ") for a = (" + fixed(a1) + ", " +
                          fixed(a2) + ")",
                      std::abs(res) / scale, "< 1e-9", std::abs(res) / scale < 1e-9);
        }
    }
    run.csv("pohozaev", {"a1", "a2", "sigma1", "sigma2", "residual"}, rows);
    return run.finish();
}

int run_disk(const Experiment& e, Run& run) {
    const RadialGrid grid(static_cast<std::size_t>(e.config.disk_nodes));
    std::vector<std::vector<std::string>> rows;
    for (double a : e.config.disk_alphas) {
        const DiskDeficit zero = local_mt_deficit_disk(grid, std::vector<double>(grid.r.size(), 0.0), a);
        rows.push_back({num(a), "0", num(zero.dirichlet), num(zero.weighted_integral), num(zero.deficit)});
        const double closed = -16 * pi * (1 + a) * std::log(pi / (1 + a));
        const double rel = std::abs(zero.deficit / closed - 1);
        run.check("u = 0 deficit vs closed form at alpha " + fixed(a), rel, "< 0.01", rel < 0.01);
        double lo = INFINITY, hi = -INFINITY, mean = 0.0;
        for (int t = 1; t <= 6; ++t) {
            const DiskDeficit d = local_mt_deficit_disk(grid, truncated_log_profile(grid, t, a), a);
            rows.push_back({num(a), std::to_string(t), num(d.dirichlet), num(d.weighted_integral), num(d.deficit)});
            lo = std::min(lo, d.deficit);
            hi = std::max(hi, d.deficit);
            mean += d.deficit / 6;
        }
        const double spread = (hi - lo) / std::abs(mean);
        run.check("truncated-log family spread / |mean| at alpha " + fixed(a), spread, "< 0.5", spread < 0.5);
    }
    run.csv("disk", {"alpha", "t", "dirichlet", "weighted_integral", "deficit"}, rows);
    return run.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for the singular Toda Moser-Trudinger functional"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "INI experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "random seed (overrides run.seed)");
    const std::vector<std::string> names{"verify", "sweep", "minimize", "continue", "pohozaev", "disk-check"};
    for (const auto& n : names) app.add_subcommand(n);
    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
        if (seed) cfg.seed = *seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        cfg.validate();
        const Experiment e(cfg);
        Run run(command, e, cfg.out_dir);
        if (command == "verify") return run_verify(e, run, threads);
        if (command == "sweep") return run_sweep(e, run, threads);
        if (command == "minimize") return run_minimize(e, run);
        if (command == "continue") return run_continuation(e, run);
        if (command == "pohozaev") return run_pohozaev(e, run);
        return run_disk(e, run);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
