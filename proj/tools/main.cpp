#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvx/config.hpp"
#include "cvx/errors.hpp"
#include "cvx/flow.hpp"
#include "cvx/io.hpp"
#include "cvx/shapes.hpp"
#include "cvx/verify.hpp"

namespace {

struct Overrides {
    std::string out, shape;
    long seed = -1;
    bool quiet = false;
};

void apply(cvx::FlowConfig& cfg, const Overrides& o) {
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.shape.empty()) cfg.shape = o.shape;
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
}

// Runs one configuration end to end and writes its artifacts.
// Returns false when a monitor failed or the run did not converge in time.
bool run_one(const cvx::FlowConfig& cfg, bool quiet) {
    auto a = cvx::assemble(cfg);
    cvx::FlowEngine engine(a.grid, a.params, a.s0);
    const auto res = engine.run();

    const auto dir = std::filesystem::path(cfg.out_dir);
    const auto csv = (dir / "timeseries.csv").string();
    cvx::export_timeseries(res.traj, csv);
    std::string art = csv;
    if (cfg.n == 1) {
        const auto svg = (dir / "shape.svg").string();
        cvx::export_svg(a.grid, engine.s(), svg);
        art += ", " + svg;
    } else {
        const auto obj = (dir / "shape.obj").string();
        cvx::export_mesh(a.grid, engine.s(), obj);
        art += ", " + obj;
    }

    if (!quiet) {
        std::cout << "shape " << cfg.shape << "  n=" << cfg.n << " k=" << cfg.k;
        if (cfg.homogeneous)
            std::cout << " alpha=" << cfg.alpha;
        else
            std::cout << " mu=" << cfg.mu_name;
        std::cout << "  constraint " << cfg.constraint << "\n";
        std::cout << "steps " << res.steps << "  t " << engine.t()
                  << "  converged " << (res.converged ? "yes" : "no")
                  << "  rhat " << res.rhat << "\n";
        std::cout << "constraint drift " << res.worst_drift
                  << "  quadrature estimate " << res.traj.eps_quad << "\n";
        std::cout << "wrote " << art << "\n";
    }
    for (const auto& m : res.monitor_failures)
        std::cerr << "monitor: " << m << "\n";
    return res.monitors_ok();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained curvature flow of convex bodies via the support function"};
    app.require_subcommand(1);
    Overrides ovr;

    std::string cfg_path;
    auto* run = app.add_subcommand("run", "run one configuration file");
    run->add_option("config", cfg_path, "configuration file")->required();
    run->add_option("--out", ovr.out, "output directory override");
    run->add_option("--seed", ovr.seed, "diagnostic sampling seed override");
    run->add_option("--shape", ovr.shape, "initial shape override");
    run->add_flag("--quiet", ovr.quiet, "suppress the summary");

    auto* shapes = app.add_subcommand("shapes", "list the shape catalog");

    bool verbose = false;
    auto* verify = app.add_subcommand("verify", "run the built-in self checks");
    verify->add_flag("--verbose", verbose, "print measured values for passing checks");

    std::vector<std::string> params;
    auto* sweep = app.add_subcommand("sweep", "run a config over parameter lists");
    sweep->add_option("config", cfg_path, "configuration file")->required();
    sweep->add_option("--param", params, "key=v1,v2,... (repeatable)")
        ->required()
        ->take_all();
    sweep->add_option("--out", ovr.out, "output directory root");
    sweep->add_flag("--quiet", ovr.quiet, "suppress per-run summaries");

    CLI11_PARSE(app, argc, argv);

    try {
        if (shapes->parsed()) {
            for (const auto& line : cvx::catalog_summary()) std::cout << line << "\n";
            return 0;
        }
        if (verify->parsed()) return cvx::verify_all(std::cout, verbose) == 0 ? 0 : 2;

        if (run->parsed()) {
            auto cfg = cvx::parse_config_file(cfg_path);
            apply(cfg, ovr);
            return run_one(cfg, ovr.quiet) ? 0 : 2;
        }

        // sweep: cartesian product over the value lists
        const auto base = cvx::parse_config_file(cfg_path);
        std::vector<std::pair<std::string, std::vector<std::string>>> grid;
        for (const auto& p : params) {
            const auto eq = p.find('=');
            if (eq == std::string::npos)
                throw cvx::InvalidConfig("--param wants key=v1,v2,..., got '" + p + "'");
            std::vector<std::string> vals;
            std::string v = p.substr(eq + 1);
            for (std::size_t pos = 0; pos <= v.size();) {
                const auto comma = v.find(',', pos);
                vals.push_back(v.substr(pos, comma - pos));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (vals.empty())
                throw cvx::InvalidConfig("--param '" + p + "' lists no values");
            grid.emplace_back(p.substr(0, eq), vals);
        }
        std::vector<std::size_t> idx(grid.size(), 0);
        int failures = 0;
        const std::string root = ovr.out.empty() ? base.out_dir : ovr.out;
        for (;;) {
            std::string text = cvx::render_config(base), tag;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                text += grid[i].first + " = " + grid[i].second[idx[i]] + "\n";
                tag += (i ? "_" : "") + grid[i].first + "-" + grid[i].second[idx[i]];
            }
            auto cfg = cvx::parse_config(text);
            Overrides o = ovr;
            o.out = (std::filesystem::path(root) / tag).string();
            apply(cfg, o);
            if (!ovr.quiet) std::cout << "--- " << tag << "\n";
            if (!run_one(cfg, ovr.quiet)) ++failures;
            std::size_t i = 0;
            for (; i < grid.size(); ++i) {
                if (++idx[i] < grid[i].second.size()) break;
                idx[i] = 0;
            }
            if (i == grid.size()) break;
        }
        return failures == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
