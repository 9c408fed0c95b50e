#include "regobs/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <omp.h>

#include "CLI11.hpp"

#include "regobs/billiard.hpp"
#include "regobs/hum.hpp"
#include "regobs/observability.hpp"
#include "regobs/reachability.hpp"

namespace regobs
{
    namespace fs = std::filesystem;

    namespace
    {
        Json time_value(double t, bool infinite)
        {
            if (infinite || !std::isfinite(t))
                return "Infinite";
            return t;
        }

        Json vec_json(Vec2 v) { return Json::array({v.x, v.y}); }

        void write_text(const fs::path& path, const std::string& text)
        {
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw Error(ErrorCode::Io, "cannot write " + path.string());
            out << text;
        }

        void write_summary(const fs::path& dir, const Json& summary)
        {
            write_text(dir / "summary.json", summary.dump(2) + "\n");
        }

        ConfigObject block(const ExperimentConfig& cfg, const std::string& name)
        {
            static const Json empty = Json::object();
            return cfg.blocks.contains(name) ? ConfigObject(cfg.blocks.at(name), name) : ConfigObject(empty, name);
        }

        std::string csv_number(double x)
        {
            std::ostringstream ss;
            ss.precision(17);
            ss << x;
            return ss.str();
        }

        DirectionSample direction_sample(ConfigObject& o)
        {
            DirectionSample ds;
            ds.count = o.integer("directions", ds.count);
            ds.adaptive = o.boolean("adaptive", ds.adaptive);
            ds.max_count = o.integer("max_directions", std::max(ds.max_count, ds.count));
            return ds;
        }

        ReachabilityOptions reachability_options(ConfigObject& o)
        {
            ReachabilityOptions ro;
            ro.grid_h = o.number("grid_h", ro.grid_h);
            ro.boundary_h = o.number("boundary_h", ro.boundary_h);
            ro.tol_time = o.positive("tol_time", ro.tol_time);
            ro.refine_top = o.integer("refine_top", ro.refine_top);
            ro.max_terminated_fraction = o.number("max_terminated_fraction", ro.max_terminated_fraction);
            return ro;
        }

        /// Smooth bumps exp(1 - 1/(1 - s^2)), s = |x - center| / radius.
        Field bump_field(const Grid2& g, const Json& list, const std::string& path)
        {
            Field f = Field::Zero(g.size());
            if (!list.is_array())
                throw Error(ErrorCode::Config, path + ": expected an array of bumps");
            for (std::size_t b = 0; b < list.size(); ++b)
            {
                ConfigObject o(list[b], path + "[" + std::to_string(b) + "]");
                const Vec2 c = o.point("center");
                const double r = o.positive("radius");
                const double a = o.number("amplitude", 1.0);
                o.finish();
                for (int k = 0; k < g.size(); ++k)
                {
                    const double s = norm(g.node(k) - c) / r;
                    if (s < 1.0)
                        f[k] += a * std::exp(1.0 - 1.0 / (1.0 - s * s));
                }
            }
            return f;
        }

        Json grid_json(const Grid2& g)
        {
            return {{"origin", vec_json(g.origin)}, {"nx", g.nx}, {"ny", g.ny}, {"hx", g.hx}, {"hy", g.hy},
                    {"dt", g.dt}, {"steps", g.steps}};
        }

        std::string suffix(std::size_t k, std::size_t count)
        {
            return count > 1 ? "_" + std::to_string(k) : "";
        }
    } // namespace

    int exit_code_for(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::Config:
        case ErrorCode::ConfigUnsupported:
        case ErrorCode::InvalidArgument:
        case ErrorCode::GridMismatch:
        case ErrorCode::Io:
            return 2;
        case ErrorCode::NoConvergence:
            return 3;
        default:
            return 4;
        }
    }

    void write_matrix(const fs::path& base, const Eigen::MatrixXd& m, const Json& meta)
    {
        Json header = meta;
        header["format"] = "regobs-matrix";
        header["dtype"] = "float64";
        header["endianness"] = "little";
        header["layout"] = "row-major";
        header["shape"] = Json::array({m.rows(), m.cols()});
        header["data"] = base.filename().string() + ".bin";
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
        std::ofstream out(base.string() + ".bin", std::ios::binary);
        if (!out)
            throw Error(ErrorCode::Io, "cannot write " + base.string() + ".bin");
        out.write(reinterpret_cast<const char *>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
        write_text(base.string() + ".json", header.dump(2) + "\n");
    }

    Json cmd_rays(const ExperimentConfig& cfg, const fs::path& out_dir)
    {
        ConfigObject o = block(cfg, "rays");
        const double t_max = o.positive("t_max");
        const Json& points = o.has("points") ? o.raw("points") : Json::array();
        o.finish();
        if (!points.is_array())
            throw Error(ErrorCode::Config, "rays.points: expected an array");

        Json rays = Json::array();
        std::string csv = "ray,segment,t_start,x_start,y_start,t_end,x_end,y_end\n";
        std::size_t segments = 0;
        for (std::size_t r = 0; r < points.size(); ++r)
        {
            ConfigObject p(points[r], "rays.points[" + std::to_string(r) + "]");
            const Vec2 x = p.point("x");
            Vec2 dir;
            if (p.has("angle_deg"))
                dir = unit_from_angle(p.number("angle_deg") * pi / 180.0);
            else
                dir = p.point("dir");
            p.finish();
            if (norm(dir) == 0.0)
                throw Error(ErrorCode::Config, p.field("dir") + ": direction must be nonzero");
            dir = normalized(dir);
            require(cfg.domain.contains(x), ErrorCode::OutOfRange, "ray start " + p.path() + " lies outside the domain");

            const RayPath path = flow(cfg.domain, {x, dir, 0.0}, t_max);
            Json segs = Json::array(), events = Json::array();
            for (std::size_t s = 0; s < path.segments.size(); ++s)
            {
                const Segment& seg = path.segments[s];
                segs.push_back({{"start", vec_json(seg.start)}, {"end", vec_json(seg.end)}, {"t_start", seg.t_start},
                                {"t_end", seg.t_end}});
                csv += std::to_string(r) + "," + std::to_string(s) + "," + csv_number(seg.t_start) + "," +
                       csv_number(seg.start.x) + "," + csv_number(seg.start.y) + "," + csv_number(seg.t_end) + "," +
                       csv_number(seg.end.x) + "," + csv_number(seg.end.y) + "\n";
            }
            for (const auto& e : path.events)
                events.push_back({{"x", vec_json(e.x_hit)}, {"t", e.t_hit}, {"incidence_cos", e.incidence_cos},
                                  {"kind", event_kind_name(e.kind)}});
            segments += path.segments.size();
            rays.push_back({{"start", vec_json(x)}, {"dir", vec_json(dir)}, {"termination", termination_name(path.terminated)},
                            {"segments", segs}, {"events", events}});
        }
        write_text(out_dir / "rays.json", rays.dump(2) + "\n");
        write_text(out_dir / "rays.csv", csv);
        Json summary = {{"command", "rays"}, {"rays", points.size()}, {"segments", segments},
                        {"files", Json::array({"rays.json", "rays.csv"})}};
        write_summary(out_dir, summary);
        return summary;
    }

    Json cmd_critical_time(const ExperimentConfig& cfg, const fs::path& out_dir)
    {
        ConfigObject o = block(cfg, "critical_time");
        const DirectionSample ds = direction_sample(o);
        const ReachabilityOptions ro = reachability_options(o);
        const double t_cap = o.positive("t_cap", 10.0);
        UcOptions uo;
        uo.sample_fraction = o.positive("uc_sample_fraction", uo.sample_fraction);
        uo.tol_fraction = o.positive("uc_tol_fraction", uo.tol_fraction);
        std::optional<std::pair<double, double>> arc;
        if (o.has("arc_closed_form"))
        {
            ConfigObject a = o.object("arc_closed_form");
            arc = {a.number("alpha_deg") * pi / 180.0, a.positive("epsilon")};
            a.finish();
        }
        o.finish();
        const Region& omega = cfg.require_omega();

        Json summary = {{"command", "critical_time"}};
        double undetermined = 0.0;
        if (cfg.region_O)
        {
            const auto c = critical_time(cfg.domain, *cfg.region_O, omega, ds, t_cap, ro);
            summary["critical_time"] = time_value(c.value, c.infinite);
            undetermined = std::max(undetermined, c.undetermined_fraction);
        }
        else
            summary["critical_time"] = nullptr;
        const auto g = gcc_time(cfg.domain, omega, ds, t_cap, ro);
        summary["gcc_time"] = time_value(g.value, g.infinite);
        undetermined = std::max(undetermined, g.undetermined_fraction);
        summary["uc_time"] = uc_time(cfg.domain, omega, uo);
        summary["undetermined_fraction"] = undetermined;
        if (arc)
        {
            const auto a = arc_example_time(arc->first, arc->second);
            summary["closed_form_critical_time"] = a.length;
            summary["closed_form_k_c"] = a.k_c;
        }
        write_summary(out_dir, summary);
        return summary;
    }

    Json cmd_reachable(const ExperimentConfig& cfg, const fs::path& out_dir)
    {
        ConfigObject o = block(cfg, "reachable");
        std::vector<double> times;
        if (o.has("T_values"))
            times = o.numbers("T_values");
        else
            times.push_back(o.number("T"));
        const double grid_h = o.positive("grid_h", cfg.domain.diameter() / 100.0);
        DirectionSample ds;
        ds.count = o.integer("directions", 360);
        o.finish();
        const Region& omega = cfg.require_omega();
        for (double t : times)
            require(t >= 0.0, ErrorCode::Config, "reachable: times must be nonnegative");

        Json rasters = Json::array();
        for (std::size_t k = 0; k < times.size(); ++k)
        {
            const auto r = reachable_set(cfg.domain, omega, times[k], grid_h, ds);
            long counts[4] = {0, 0, 0, 0};
            std::string csv = "i,j,x,y,flag\n";
            for (int j = 0; j < r.ny; ++j)
                for (int i = 0; i < r.nx; ++i)
                {
                    const NodeFlag f = r.at(i, j);
                    ++counts[static_cast<int>(f)];
                    const Vec2 x = r.node(i, j);
                    csv += std::to_string(i) + "," + std::to_string(j) + "," + csv_number(x.x) + "," + csv_number(x.y) +
                           "," + node_flag_name(f) + "\n";
                }
            const std::string file = "reachable" + suffix(k, times.size()) + ".csv";
            write_text(out_dir / file, csv);
            rasters.push_back({{"T", times[k]}, {"file", file}, {"nx", r.nx}, {"ny", r.ny}, {"h", r.h},
                               {"all_directions_hit", counts[0]}, {"some_direction_misses", counts[1]},
                               {"undetermined", counts[2]}, {"outside", counts[3]},
                               {"undetermined_fraction", r.undetermined_fraction()}});
        }
        Json summary = {{"command", "reachable"}, {"rasters", rasters}};
        write_summary(out_dir, summary);
        return summary;
    }

    Json cmd_observe(const ExperimentConfig& cfg, const fs::path& out_dir)
    {
        ConfigObject o = block(cfg, "observe");
        GramianSpec spec;
        spec.domain = cfg.domain;
        spec.omega = cfg.require_omega();
        spec.support = cfg.require_O();
        spec.T = o.positive("T");
        std::vector<int> cells, cells_y;
        for (double c : o.numbers("cells"))
            cells.push_back(static_cast<int>(c));
        if (o.has("cells_y"))
            for (double c : o.numbers("cells_y"))
                cells_y.push_back(static_cast<int>(c));
        else
            cells_y = cells;
        spec.courant = o.positive("courant", spec.courant);
        spec.quantity = parse_quantity(o.string("quantity", quantity_name(spec.quantity)));
        spec.norm = parse_data_norm(o.string("norm", data_norm_name(spec.norm)));
        spec.filter.cutoff_fraction = o.positive("filter_cutoff", spec.filter.cutoff_fraction);
        spec.leakage = o.positive("leakage", spec.leakage);
        const std::string method = o.string("eigensolver", "lobpcg");
        RayleighOptions ro;
        ro.tol = o.positive("tol", 1e-6);
        ro.max_iterations = o.integer("max_iterations", ro.max_iterations);
        ro.block_size = o.integer("block_size", ro.block_size);
        ro.seed = cfg.seed;
        const bool check_time = o.boolean("report_critical_time", true);
        o.finish();
        if (method != "lobpcg" && method != "dense")
            throw Error(ErrorCode::Config, "observe.eigensolver: expected 'lobpcg' or 'dense'");
        if (cells.empty() || cells_y.size() != cells.size())
            throw Error(ErrorCode::Config, "observe.cells: need a nonempty list (and cells_y of the same length)");
        require(spec.omega->is_interior() && spec.support->is_interior(), ErrorCode::BoundaryRegion,
                "observe needs interior omega and O");

        Json summary = {{"command", "observe"}, {"T", spec.T}, {"quantity", quantity_name(spec.quantity)},
                        {"norm", data_norm_name(spec.norm)}, {"eigensolver", method}};
        if (check_time && !spec.omega->is_empty())
        {
            DirectionSample ds;
            ds.adaptive = false;
            ds.count = 180;
            const auto c = critical_time(cfg.domain, *spec.support, *spec.omega, ds, 4.0 * spec.T + 10.0);
            summary["critical_time"] = time_value(c.value, c.infinite);
            summary["T_exceeds_critical_time"] = !c.infinite && spec.T > c.value;
        }

        Json rows = Json::array();
        std::string csv = "cells,cells_y,dimension,lambda_min,constant,iterations\n";
        for (std::size_t k = 0; k < cells.size(); ++k)
        {
            GramianSpec s = spec;
            s.cells_x = cells[k];
            s.cells_y = cells_y[k];
            const Gramian g(s);
            const RayleighResult r = method == "dense" ? dense_min_rayleigh(g) : min_rayleigh(g, ro);
            const double lambda = std::max(r.lambda_min, 0.0);
            const Json constant = lambda > 0.0 ? Json(1.0 / std::sqrt(lambda)) : Json("Infinite");
            rows.push_back({{"cells", cells[k]}, {"cells_y", cells_y[k]}, {"dimension", g.dimension()},
                            {"lambda_min", lambda}, {"constant", constant}, {"iterations", r.iterations}});
            csv += std::to_string(cells[k]) + "," + std::to_string(cells_y[k]) + "," + std::to_string(g.dimension()) +
                   "," + csv_number(lambda) + "," +
                   (lambda > 0.0 ? csv_number(1.0 / std::sqrt(lambda)) : std::string("Infinite")) + "," +
                   std::to_string(r.iterations) + "\n";
        }
        write_text(out_dir / "refinement.csv", csv);
        summary["rows"] = rows;
        write_summary(out_dir, summary);
        return summary;
    }

    Json cmd_control(const ExperimentConfig& cfg, const fs::path& out_dir)
    {
        ConfigObject o = block(cfg, "control");
        ControlSetup setup;
        setup.domain = cfg.domain;
        setup.omega = cfg.require_omega();
        setup.region = cfg.require_O();
        setup.T = o.positive("T");
        setup.cells_x = o.integer("cells");
        setup.cells_y = o.integer("cells_y", setup.cells_x);
        setup.courant = o.positive("courant", setup.courant);
        setup.filter.cutoff_fraction = o.positive("filter_cutoff", setup.filter.cutoff_fraction);
        setup.leakage = o.positive("leakage", setup.leakage);
        setup.margin_cells = o.integer("margin_cells", setup.margin_cells);
        setup.chi_directions = o.integer("chi_directions", setup.chi_directions);
        setup.verify_geometry = o.boolean("verify_geometry", true);
        const HumVariant variant = parse_hum_variant(o.string("variant", "J"));
        std::vector<double> eps;
        if (o.has("epsilons"))
            eps = o.numbers("epsilons");
        else
            eps.push_back(o.number("epsilon", variant == HumVariant::Eps ? -1.0 : 0.0));
        CgOptions cg;
        cg.tol = o.positive("cg_tol", cg.tol);
        cg.max_iterations = o.integer("max_iterations", cg.max_iterations);
        const bool write_state = o.boolean("write_state", true);
        ConfigObject t = o.object("target");
        const Json u0 = t.has("u0") ? t.raw("u0") : Json::array();
        const Json u1 = t.has("u1") ? t.raw("u1") : Json::array();
        t.finish();
        o.finish();
        if (variant == HumVariant::Eps)
            for (double e : eps)
                if (!(e > 0.0))
                    throw Error(ErrorCode::Config, "control.epsilon: J_eps needs positive epsilon values");

        const HumSolver hum(setup);
        const Grid2& g = hum.solver().grid();
        const WaveState target{bump_field(g, u0, "control.target.u0"), bump_field(g, u1, "control.target.u1")};
        const double target_norm = std::sqrt(hum.solver().energy_norm_sq(target));

        Json runs = Json::array();
        for (std::size_t k = 0; k < eps.size(); ++k)
        {
            const ControlSolution s = hum.solve(target, variant, eps[k], cg);
            const std::string sfx = suffix(k, eps.size());
            std::string csv = "iteration,relative_residual,functional\n";
            for (std::size_t i = 0; i < s.residual_history.size(); ++i)
                csv += std::to_string(i) + "," + csv_number(s.residual_history[i]) + "," +
                       csv_number(s.functional_history[i]) + "\n";
            write_text(out_dir / ("residuals" + sfx + ".csv"), csv);
            Json files = Json::array({"residuals" + sfx + ".csv"});
            if (write_state)
            {
                const Json meta = {{"grid", grid_json(g)}, {"omega_nodes", hum.omega_mask()}};
                write_matrix(out_dir / ("control" + sfx), s.v, meta);
                Eigen::MatrixXd terminal(2, g.size());
                terminal.row(0) = s.terminal.u0.transpose();
                terminal.row(1) = s.terminal.u1.transpose();
                write_matrix(out_dir / ("terminal" + sfx), terminal, {{"grid", grid_json(g)}, {"rows", {"u", "dt_u"}}});
                files.push_back("control" + sfx + ".json");
                files.push_back("terminal" + sfx + ".json");
            }
            runs.push_back({{"variant", hum_variant_name(variant)},
                            {"epsilon", eps[k]},
                            {"iterations", s.iterations},
                            {"final_residual", s.residual_history.empty() ? 0.0 : s.residual_history.back()},
                            {"control_norm", s.control_norm},
                            {"target_energy_norm", target_norm},
                            {"projection_error_on_O", s.projection_error_on_O},
                            {"relative_projection_error", s.relative_projection_error},
                            {"global_error", s.global_error},
                            {"lambda_estimate", s.lambda_estimate},
                            {"coercivity_warning", s.coercivity_warning},
                            {"identity_residual", s.identity_residual},
                            {"files", files}});
            if (s.coercivity_warning)
                std::cerr << "warning: CoercivityWarning: restricted Gramian eigenvalue estimate " << s.lambda_estimate
                          << " is below 1e-8\n";
        }
        Json summary = {{"command", "control"}, {"grid", grid_json(g)}, {"runs", runs}};
        write_summary(out_dir, summary);
        return summary;
    }

    int run_cli(int argc, char ** argv)
    {
        CLI::App app{"Regional observability and projection control for the wave equation"};
        app.require_subcommand(1);
        std::string config_path;
        std::string out_dir = ".";
        int threads = 0;
        app.add_option("--threads", threads, "Cap on worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);

        struct Command
        {
            const char * name;
            const char * help;
            Json (*run)(const ExperimentConfig&, const fs::path&);
        };
        const Command commands[] = {
            {"rays", "Trace broken rays from listed phase points", cmd_rays},
            {"critical-time", "Critical, GCC and unique-continuation times", cmd_critical_time},
            {"reachable", "Raster of the set reached from omega by time T", cmd_reachable},
            {"observe", "Observability constants under grid refinement", cmd_observe},
            {"control", "Projection control by conjugate gradients", cmd_control},
        };
        for (const auto& c : commands)
        {
            CLI::App * sub = app.add_subcommand(c.name, c.help);
            sub->add_option("config", config_path, "JSON experiment config")->required();
            sub->add_option("-o,--out", out_dir, "Output directory");
            sub->add_option("--threads", threads, "Cap on worker threads (0 keeps the default)")
                ->check(CLI::NonNegativeNumber);
        }

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError& e)
        {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        try
        {
            if (threads > 0)
                omp_set_num_threads(threads);
            const ExperimentConfig cfg = load_config(config_path);
            fs::create_directories(out_dir);
            for (const auto& c : commands)
                if (app.got_subcommand(c.name))
                {
                    std::cout << c.run(cfg, out_dir).dump(2) << "\n";
                    return 0;
                }
            return 2;
        }
        catch (const ConvergenceError& e)
        {
            std::cerr << "error: " << e.what() << " (iterations " << e.iterations() << ", best estimate "
                      << e.best_estimate() << ")\n";
            return 3;
        }
        catch (const Error& e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return exit_code_for(e.code());
        }
        catch (const fs::filesystem_error& e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        catch (const Json::exception& e)
        {
            std::cerr << "error: Config: " << e.what() << "\n";
            return 2;
        }
    }
} // namespace regobs
