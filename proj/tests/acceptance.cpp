#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "regobs/cli.hpp"
#include "regobs/observability.hpp"
#include "regobs/wave1d.hpp"

using namespace regobs;
namespace fs = std::filesystem;

namespace
{
    const fs::path config_dir = REGOBS_CONFIG_DIR;

    struct Outcome
    {
        bool pass = true;
        std::string detail;

        void check(bool ok, const std::string& what)
        {
            pass = pass && ok;
            if (!detail.empty())
                detail += "; ";
            detail += what + (ok ? "" : " [FAIL]");
        }
    };

    std::string fmt(const char * f, double x)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, x);
        return buf;
    }

    Json load(const std::string& name)
    {
        std::ifstream in(config_dir / (name + ".json"));
        return Json::parse(in);
    }

    ExperimentConfig config(const Json& j) { return parse_config(j.dump()); }

    fs::path out_dir(const std::string& name)
    {
        const fs::path p = fs::temp_directory_path() / "regobs_acceptance" / name;
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }

    std::string read_file(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::vector<double> read_doubles(const fs::path& p)
    {
        const std::string bytes = read_file(p);
        std::vector<double> v(bytes.size() / sizeof(double));
        std::memcpy(v.data(), bytes.data(), v.size() * sizeof(double));
        return v;
    }

    bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

    double bump(double x, double lo, double hi)
    {
        if (x <= lo || x >= hi)
            return 0.0;
        const double s = (2.0 * x - lo - hi) / (hi - lo);
        return std::exp(1.0 - 1.0 / (1.0 - s * s));
    }

    Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng)
    {
        std::normal_distribution<double> nd;
        Eigen::VectorXd v(n);
        for (auto& x : v)
            x = nd(rng);
        return v;
    }

    Outcome criterion1()
    {
        Outcome o;
        const Json s = cmd_critical_time(config(load("fig1_critical_time")), out_dir("c1"));
        const double c = s["critical_time"], g = s["gcc_time"], u = s["uc_time"];
        o.check(near(c, 1.0, 1e-3), fmt("critical_time %.6f", c));
        o.check(near(u, 1.5, 1e-6), fmt("uc_time %.8f", u));
        o.check(near(g, 1.5, 1e-3), fmt("gcc_time %.6f", g));
        return o;
    }

    Outcome criterion2()
    {
        Outcome o;
        const Json base = load("fig2_disk_critical_time");
        const double pairs[3][2] = {{0.3, 0.2}, {0.5, 0.1}, {0.2, 0.3}};
        for (const auto& p : pairs)
        {
            const double alpha = p[0], eps = p[1];
            Json j = base;
            j["O"]["radius"] = alpha;
            j["omega"]["r_inner"] = 1.0 - eps;
            const auto t0 = std::chrono::steady_clock::now();
            const Json s = cmd_critical_time(config(j), out_dir("c2"));
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const double c = s["critical_time"], u = s["uc_time"];
            const std::string tag = "(" + fmt("%.1f", alpha) + "," + fmt("%.1f", eps) + ")";
            o.check(secs < 1.0, tag + fmt(" %.2f s", secs));
            o.check(near(c, 1.0 + alpha - eps, 5e-3), tag + fmt(" critical_time %.5f", c));
            o.check(near(u, 2.0 * (1.0 - eps), 5e-3), tag + fmt(" uc_time %.5f", u));
        }
        return o;
    }

    Outcome criterion3()
    {
        Outcome o;
        const Json s = cmd_critical_time(config(load("fig3_arc_critical_time")), out_dir("c3"));
        const double c = s["critical_time"], closed = s["closed_form_critical_time"];
        o.check(std::abs(c - closed) <= 0.02 * closed, fmt("critical_time %.4f", c) + fmt(" vs closed form %.4f", closed));
        o.check(s["gcc_time"] == "Infinite", "gcc_time " + s["gcc_time"].dump());
        return o;
    }

    Outcome criterion4()
    {
        Outcome o;
        const Json sq = cmd_critical_time(config(load("remark44_square_collar")), out_dir("c4a"));
        const double g = sq["gcc_time"], u = sq["uc_time"];
        o.check(near(g, std::sqrt(2.0) * 0.8, 5e-3), fmt("square gcc_time %.5f", g));
        o.check(near(u, 0.8, 1e-3), fmt("square uc_time %.5f", u));
        const Json wg = cmd_critical_time(config(load("remark44_whispering_gallery")), out_dir("c4b"));
        const double uw = wg["uc_time"];
        o.check(wg["gcc_time"] == "Infinite", "gallery gcc_time " + wg["gcc_time"].dump());
        o.check(near(uw, 1.0, 1e-3), fmt("gallery uc_time %.5f", uw));
        return o;
    }

    Outcome criterion5()
    {
        Outcome o;
        const Domain d = Domain::interval(-1, 1);
        const LineGrid lg = LineGrid::on(d, 2000);
        const int steps = 10000;
        const WaveSolver solver(Grid2::make(d, lg.cells, 0, steps * lg.h(), 1.0, 1.0));
        LineState s{lg, Eigen::VectorXd::Zero(lg.nodes()), Eigen::VectorXd::Zero(lg.nodes())};
        for (int i = 0; i <= lg.cells; ++i)
        {
            const double x = lg.x(i);
            s.u0[i] = bump(x, -0.6, 0.1) + 0.3 * bump(x, 0.2, 0.9);
            s.u1[i] = bump(x, -0.2, 0.5);
        }
        Field prev = solver.backward_start({interior_of(s.u0), interior_of(s.u1)});
        Field cur = interior_of(s.u0);
        solver.step(prev, cur);
        auto exact = transport_from_leapfrog(lg, with_endpoints(prev), with_endpoints(cur), lg.h());
        const double scale = std::max(exact.w_plus.lpNorm<Eigen::Infinity>(), exact.w_minus.lpNorm<Eigen::Infinity>());
        const double e0 = exact.energy();
        const double l0 = solver.leapfrog_energy(prev, cur);
        double worst = 0.0, drift = 0.0, leap_drift = 0.0;
        for (int n = 1; n < steps; ++n)
        {
            solver.step(prev, cur);
            step_exact(exact);
            const auto lf = transport_from_leapfrog(lg, with_endpoints(prev), with_endpoints(cur), exact.t);
            worst = std::max({worst, (lf.w_plus - exact.w_plus).lpNorm<Eigen::Infinity>(),
                              (lf.w_minus - exact.w_minus).lpNorm<Eigen::Infinity>()});
            drift = std::max(drift, std::abs(exact.energy() - e0) / e0);
            leap_drift = std::max(leap_drift, std::abs(solver.leapfrog_energy(prev, cur) - l0) / l0);
        }
        o.check(worst <= 1e-10 * scale, fmt("max node error %.2e", worst / scale) + " relative");
        o.check(drift <= 1e-12, fmt("oracle energy drift %.2e", drift));
        o.check(leap_drift <= 1e-12, fmt("leapfrog energy drift %.2e", leap_drift));
        return o;
    }

    Outcome criterion6()
    {
        Outcome o;
        Grid2 g = Grid2::make(Domain::rectangle({0, 0}, {1, 1}), 50, 50, 1.0);
        g.steps = 10000;
        const WaveSolver s(g);
        Field a(g.size());
        for (int n = 0; n < g.size(); ++n)
            a[n] = std::sin(pi * g.node(n).x) * std::sin(pi * g.node(n).y);
        const double lambda = 8.0 / (g.hx * g.hx) * std::pow(std::sin(pi * g.hx / 2.0), 2);
        const double theta = std::acos(1.0 - 0.5 * g.dt * g.dt * lambda);
        Field prev = s.backward_start({a, Field::Zero(g.size())});
        Field cur = a;
        const double e0 = s.leapfrog_energy(prev, cur);
        double worst = 0.0, drift = 0.0;
        for (int n = 1; n <= g.steps; ++n)
        {
            s.step(prev, cur);
            worst = std::max(worst, (cur - std::cos(n * theta) * a).lpNorm<Eigen::Infinity>());
            drift = std::max(drift, std::abs(s.leapfrog_energy(prev, cur) - e0) / e0);
        }
        o.check(worst <= 1e-10, fmt("mode error %.2e", worst));
        o.check(drift <= 1e-9, fmt("energy drift %.2e", drift));
        return o;
    }

    Outcome criterion7()
    {
        Outcome o;
        std::mt19937_64 rng(7);
        for (bool two_d : {false, true})
        {
            const Domain d = two_d ? Domain::rectangle({0, 0}, {1, 1}) : Domain::interval(-1, 1);
            const WaveSolver s(Grid2::make(d, 40, 30, 1.3));
            const Grid2& g = s.grid();
            const auto mask = region_mask(g, two_d ? Region::collar(d, 0.2)
                                                   : Region::interval_union(d, {{-1.0, -0.75}, {0.75, 1.0}}));
            double worst = 0.0;
            for (Quantity q : {Quantity::U, Quantity::DtU})
                for (int trial = 0; trial < 20; ++trial)
                {
                    const WaveState x{random_vector(g.size(), rng), random_vector(g.size(), rng)};
                    SpaceTime y(g.steps + 1, static_cast<Eigen::Index>(mask.size()));
                    for (Eigen::Index r = 0; r < y.rows(); ++r)
                        y.row(r) = random_vector(y.cols(), rng).transpose();
                    const auto ox = s.observe(x, mask, q);
                    const WaveState aty = s.observe_adjoint(mask, y, q);
                    const double gap = std::abs(s.spacetime_inner(ox.values, y) - s.inner(x, aty));
                    const double scale = std::sqrt(ox.norm_sq * s.spacetime_inner(y, y)) +
                                         std::sqrt(s.inner(x, x) * s.inner(aty, aty));
                    worst = std::max(worst, gap / scale);
                }
            o.check(worst <= 1e-8, std::string(two_d ? "2-d" : "1-d") + fmt(" worst relative gap %.2e", worst));
        }
        return o;
    }

    Outcome criterion8()
    {
        Outcome o;
        const Json s = cmd_observe(config(load("thm11_observe_refinement")), out_dir("c8"));
        double lo = INFINITY, hi = 0.0;
        std::string values;
        for (const auto& row : s["rows"])
        {
            const double l = row["lambda_min"];
            lo = std::min(lo, l);
            hi = std::max(hi, l);
            values += fmt(" %.4g", l);
        }
        o.check(s["T_exceeds_critical_time"] == true, "T > critical_time");
        o.check(lo > 0.0, "lambda_min" + values);
        o.check(hi <= 2.0 * lo, fmt("spread %.3f", hi / lo));
        return o;
    }

    Outcome criterion9()
    {
        Outcome o;
        const Domain d = Domain::interval(-1, 1);
        const LineGrid g = LineGrid::on(d, 2000);
        const auto omega = Region::interval_union(d, {{-1.0, -0.75}, {0.75, 1.0}});
        // a rightward packet: u1 = -D u0 leaves no leftward component
        LineState s{g, Eigen::VectorXd::Zero(g.nodes()), Eigen::VectorXd::Zero(g.nodes())};
        for (int i = 0; i <= g.cells; ++i)
            s.u0[i] = bump(g.x(i), -0.75, -0.70);
        for (int i = 1; i < g.cells; ++i)
            s.u1[i] = -(s.u0[i + 1] - s.u0[i - 1]) / (2.0 * g.h());
        const double T = 1.4;
        const double observed = observe(s, omega, T, Quantity::DtU).norm_sq;
        const double total = T * 2.0 * to_transport(s).energy();
        o.check(observed / total <= 1e-6, fmt("observed/total %.2e", observed / total));
        const Json ct = cmd_critical_time(config(load("fig1_critical_time")), out_dir("c9"));
        o.check(T < ct["uc_time"].get<double>(), "T below uc_time");
        return o;
    }

    Outcome criterion10()
    {
        Outcome o;
        GramianSpec spec;
        spec.omega = Region::interval_union(spec.domain, {{-1.0, -0.75}, {0.75, 1.0}});
        spec.support = Region::interval_union(spec.domain, {{-0.25, 0.25}});
        spec.T = 1.2;
        spec.cells_x = 200;
        spec.courant = 1.0;
        const Gramian g(spec);
        RayleighOptions ro;
        ro.tol = 1e-10;
        const double it = min_rayleigh(g, ro).lambda_min;
        const double dense = dense_min_rayleigh(g).lambda_min;
        const double rel = std::abs(it - dense) / dense;
        o.check(rel <= 1e-6, fmt("lobpcg %.10f", it) + fmt(" dense %.10f", dense) + fmt(" rel %.1e", rel));
        return o;
    }

    Outcome criterion11()
    {
        Outcome o;
        const Domain d = Domain::interval(-10, 10);
        const LineGrid g = LineGrid::on(d, 2000);
        const auto omega = Region::interval_union(d, {{-2.0, -1.0}, {1.0, 2.0}});
        std::mt19937_64 rng(11);
        std::normal_distribution<double> nd;
        double worst = 0.0, worst_outside = 1.0;
        for (int trial = 0; trial < 50; ++trial)
        {
            // band-limited data under a smooth envelope on (-5, 2)
            Eigen::VectorXd a(12), b(12);
            for (int k = 0; k < 12; ++k)
            {
                a[k] = nd(rng);
                b[k] = nd(rng);
            }
            const auto data = [&](double lo) {
                LineState s{g, Eigen::VectorXd::Zero(g.nodes()), Eigen::VectorXd::Zero(g.nodes())};
                for (int i = 0; i <= g.cells; ++i)
                {
                    const double x = g.x(i), env = bump(x, lo, lo + 7.0);
                    for (int k = 0; k < 12; ++k)
                    {
                        s.u0[i] += env * a[k] * std::sin((k + 1) * pi * (x - lo) / 7.0) / (k + 1);
                        s.u1[i] += env * b[k] * std::sin((k + 1) * pi * (x - lo) / 7.0);
                    }
                }
                const auto split = directional_energy_split(s, omega, 3.0);
                return (split.e_plus_total - split.e_plus_in_rplus) / split.e_plus_total;
            };
            worst = std::max(worst, data(-5.0));
            // the same data moved to (2, 9) mostly miss omega to the right
            worst_outside = std::min(worst_outside, data(2.0));
        }
        o.check(worst <= 5.0 * g.h(), fmt("worst leakage %.2e", worst) + fmt(" of total, bound %.2e", 5.0 * g.h()));
        o.check(worst_outside > 0.5, fmt("data on (2, 9) leak at least %.2f", worst_outside));
        return o;
    }

    double control_ratio(const Json& base, int cells)
    {
        Json j = base;
        j["control"]["cells"] = cells;
        j["control"]["max_iterations"] = 2000;
        j["control"]["write_state"] = false;
        const Json r = cmd_control(config(j), out_dir("c12_" + std::to_string(cells)))["runs"][0];
        return r["control_norm"].get<double>() / r["target_energy_norm"].get<double>();
    }

    Outcome criterion12()
    {
        Outcome o;
        const Json base = load("thm51_control");
        const Json r = cmd_control(config(base), out_dir("c12"))["runs"][0];
        const double rel = r["relative_projection_error"], res = r["final_residual"];
        const int iters = r["iterations"];
        o.check(rel <= 1e-3, fmt("relative projection error %.2e", rel));
        o.check(res <= 1e-8, fmt("CG residual %.2e", res));
        o.check(iters <= 500, "iterations " + std::to_string(iters));
        const double c1000 = r["control_norm"].get<double>() / r["target_energy_norm"].get<double>();
        const double c500 = control_ratio(base, 500), c2000 = control_ratio(base, 2000);
        const double lo = std::min({c500, c1000, c2000}), hi = std::max({c500, c1000, c2000});
        o.check(hi <= 2.0 * lo, fmt("C %.3f", c500) + fmt(" %.3f", c1000) + fmt(" %.3f", c2000));
        return o;
    }

    Outcome criterion13()
    {
        Outcome o;
        const ExperimentConfig cfg = config(load("remark53_jeps_sweep"));
        const Json ct = cmd_critical_time(cfg, out_dir("c13_time"));
        const double T = load("remark53_jeps_sweep")["control"]["T"];
        o.check(T > ct["uc_time"].get<double>(), fmt("T %.2f > uc_time", T));
        const Json runs = cmd_control(cfg, out_dir("c13"))["runs"];
        double prev = INFINITY;
        bool decreasing = true, projected = true;
        std::string errors, proj;
        for (const auto& r : runs)
        {
            const double e = r["global_error"], p = r["relative_projection_error"];
            decreasing = decreasing && e < prev;
            projected = projected && p <= 1e-3;
            prev = e;
            errors += fmt(" %.4g", e);
            proj += fmt(" %.1e", p);
        }
        o.check(runs.size() == 3 && decreasing, "global error" + errors);
        o.check(projected, "projection error" + proj);
        return o;
    }

    Outcome criterion14()
    {
        Outcome o;
        Json j = load("thm51_control");
        const fs::path a = out_dir("c14a"), b = out_dir("c14b"), c = out_dir("c14c");
        cmd_control(config(j), a);
        cmd_control(config(j), b);
        bool identical = true;
        for (const char * f : {"summary.json", "residuals.csv", "control.bin", "terminal.bin"})
            identical = identical && read_file(a / f) == read_file(b / f);
        o.check(identical, "repeated runs byte-identical");

        for (auto& part : {"u0", "u1"})
            for (auto& bump : j["control"]["target"][part])
                bump["amplitude"] = 2.0 * bump.value("amplitude", 1.0);
        cmd_control(config(j), c);
        const auto v1 = read_doubles(a / "control.bin"), v2 = read_doubles(c / "control.bin");
        double diff = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < v1.size(); ++k)
        {
            diff += (v2[k] - 2.0 * v1[k]) * (v2[k] - 2.0 * v1[k]);
            norm += v2[k] * v2[k];
        }
        const double rel = v1.size() == v2.size() && norm > 0.0 ? std::sqrt(diff / norm) : INFINITY;
        o.check(rel <= 1e-9, fmt("doubled target gives doubled control, rel %.1e", rel));
        return o;
    }
}

int main()
{
    struct Criterion
    {
        const char * name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"1-d critical, gcc and uc times", 1.0, criterion1},
        {"disk critical and uc times", 3.0, criterion2},
        {"arc example closed form and gcc trap", 1.0, criterion3},
        {"square collar and whispering gallery", 1.0, criterion4},
        {"1-d leapfrog vs exact transport", 30.0, criterion5},
        {"2-d eigenmode dispersion", 30.0, criterion6},
        {"observation adjoint consistency", 30.0, criterion7},
        {"1-d supported observability refinement", 300.0, criterion8},
        {"1-d counterexample packet", 300.0, criterion9},
        {"dense vs iterative lambda_min", 300.0, criterion10},
        {"directional energy split", 300.0, criterion11},
        {"1-d projection control", 600.0, criterion12},
        {"penalized functional trend", 600.0, criterion13},
        {"linearity and determinism", 600.0, criterion14},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = criteria[k].run();
        }
        catch (const std::exception& e)
        {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = secs <= criteria[k].budget_s;
        const bool pass = out.pass && in_budget;
        failures += pass ? 0 : 1;
        std::printf("criterion %2zu %s: %s (%.2f s of %.0f s%s) %s\n", k + 1, criteria[k].name, pass ? "PASS" : "FAIL", secs,
                    criteria[k].budget_s, in_budget ? "" : ", over budget", out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
