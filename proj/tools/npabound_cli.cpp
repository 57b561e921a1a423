// npabound: upper bounds on two-party Bell functionals via NPA moment matrices
// and exile-and-project on the dual SDP.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "npabound/bell.hpp"
#include "npabound/bench.hpp"
#include "npabound/exile.hpp"
#include "npabound/npa.hpp"
#include "npabound/sdpa.hpp"

using namespace npabound;

namespace {

struct SolverFlags
{
    int refine = 0;
    double tol = 1e-8;
    double exile = 1e3;
    double alpha0 = 1e-3;
    std::optional<double> decay;
    double alpha_final = 1e-8;
    int history = 8;
    int max_inner = 500;
    bool iterative = false;

    void add_to(CLI::App& app)
    {
        app.add_option("--refine", refine, "Refinement steps after the single shot")->check(CLI::NonNegativeNumber);
        app.add_option("--tol", tol, "Tolerance on the distance to the PSD cone")->check(CLI::PositiveNumber);
        app.add_option("--exile", exile, "Exile distance D, in units of max(1, ||C||_F)")->check(CLI::PositiveNumber);
        app.add_option("--alpha0", alpha0, "Initial refinement step")->check(CLI::Range(0.0, 1.0));
        app.add_option("--decay", decay, "Geometric step factor c (default: sweep alpha0 down to --alpha-final)")
            ->check(CLI::Range(0.0, 1.0));
        app.add_option("--alpha-final", alpha_final, "Final step when --decay is not given")
            ->check(CLI::PositiveNumber);
        app.add_option("--history", history, "L-BFGS history size")->check(CLI::PositiveNumber);
        app.add_option("--max-inner", max_inner, "Iteration cap per projection")->check(CLI::PositiveNumber);
        app.add_flag("--iterative", iterative, "Solve the affine projection with warm-started BiCGSTAB");
    }

    SolverConfig config() const
    {
        SolverConfig cfg;
        cfg.refine_iters = refine;
        cfg.tol = tol;
        cfg.exile_distance = exile;
        cfg.alpha0 = alpha0;
        cfg.alpha_decay = decay;
        cfg.alpha_final = alpha_final;
        cfg.lbfgs_history = history;
        cfg.max_inner_iter = max_inner;
        cfg.affine_path = iterative ? AffinePath::Iterative : AffinePath::Direct;
        cfg.validate();
        return cfg;
    }
};

struct SourceFlags
{
    std::string builtin;
    std::string file;
    int random_x = 0;

    void add_to(CLI::App& app)
    {
        auto* b = app.add_option("--builtin", builtin, "Built-in functional")
                      ->check(CLI::IsMember({"chsh", "i3322"}));
        auto* f = app.add_option("--file", file, "Functional file")->check(CLI::ExistingFile);
        auto* r = app.add_option("--random", random_x, "Random R_xx22 functional with x settings (uses --seed)")
                      ->check(CLI::PositiveNumber);
        b->excludes(f)->excludes(r);
        f->excludes(r);
    }

    std::pair<BellFunctional, std::string> load(std::uint64_t seed) const
    {
        if (builtin == "chsh")
        {
            return {chsh(), "chsh"};
        }
        if (builtin == "i3322")
        {
            return {i3322(), "i3322"};
        }
        if (!file.empty())
        {
            return {load_functional(file), file};
        }
        if (random_x > 0)
        {
            return {random_rxx22(random_x, seed), "R" + std::to_string(random_x) + std::to_string(random_x) + "22-s" +
                                                      std::to_string(seed)};
        }
        throw CLI::ValidationError("one of --builtin, --file or --random is required");
    }
};

std::string join(const std::vector<int>& v)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        out << (i ? " " : "") << v[i];
    }
    return out.str();
}

int run_solve(const SourceFlags& source, const SolverFlags& solver, int level, std::uint64_t seed,
              const std::string& csv_path, const std::string& json_path)
{
    const auto [f, name] = source.load(seed);
    const SolverConfig cfg = solver.config();
    const SymbolicMomentMatrix mm = build_moment_matrix(f.scenario, level);
    const DualSdp<double> d = dualize(assemble_primal<double>(f, mm));
    const SolveReport<double> report = solve(d, cfg);
    const auto& cert = report.certificate;

    std::cout << std::setprecision(10);
    std::cout << "functional        " << name << " (" << f.scenario.inputs_a << "x" << f.scenario.inputs_b << ")\n"
              << "level             " << level << "  (n = " << d.n() << ", m = " << d.m() << ")\n"
              << "certified bound   " << cert.certified_bound << '\n'
              << "raw dual value    " << cert.raw_bound << '\n'
              << "min eigenvalue    " << std::setprecision(3) << cert.min_eigenvalue << std::setprecision(10) << '\n'
              << "single shot       " << report.bound_history.front() << '\n'
              << "refine steps      " << report.refine_steps_taken << '\n'
              << "inner iterations  " << report.total_inner_iterations() << (report.inner_iterations.size() <= 12
                                                                                ? " [" + join(report.inner_iterations) + "]"
                                                                                : std::string())
              << '\n'
              << "converged         " << (report.converged ? "yes" : "no (bound still certified)") << '\n'
              << "wall time         " << std::setprecision(4) << report.wall_time_seconds << " s\n"
              << "peak memory       " << report.memory.bytes / 1024 << " KiB (" << to_string(report.memory.source)
              << ")\n";

    if (!json_path.empty())
    {
        nlohmann::json j;
        j["functional"] = name;
        j["inputs_a"] = f.scenario.inputs_a;
        j["inputs_b"] = f.scenario.inputs_b;
        j["level"] = level;
        j["n"] = d.n();
        j["m"] = d.m();
        j["certified_bound"] = cert.certified_bound;
        j["raw_bound"] = cert.raw_bound;
        j["min_eigenvalue"] = cert.min_eigenvalue;
        j["converged"] = report.converged;
        j["refine_steps"] = report.refine_steps_taken;
        j["inner_iterations"] = report.inner_iterations;
        j["bound_history"] = report.bound_history;
        j["last_bound_change"] = report.last_bound_change;
        j["last_step_displacement"] = report.last_step_displacement;
        j["wall_time_s"] = report.wall_time_seconds;
        j["peak_memory_bytes"] = report.memory.bytes;
        j["analytic_memory_bytes"] = report.memory.analytic_bytes;
        j["memory_source"] = std::string(to_string(report.memory.source));
        std::ofstream out(json_path);
        if (!out)
        {
            throw std::runtime_error("cannot open '" + json_path + "' for writing");
        }
        out << std::setw(2) << j << '\n';
    }
    if (!csv_path.empty())
    {
        BenchRecord r;
        r.instance = name;
        r.x = f.scenario.inputs_a;
        r.seed = seed;
        r.level = level;
        r.n = static_cast<long>(d.n());
        r.m = static_cast<long>(d.m());
        r.bound = cert.certified_bound;
        r.wall_time_seconds = report.wall_time_seconds;
        r.inner_iterations = report.total_inner_iterations();
        r.refine_steps = report.refine_steps_taken;
        r.peak_memory_bytes = static_cast<double>(report.memory.bytes);
        r.memory_source = std::string(to_string(report.memory.source));
        std::ofstream out(csv_path);
        if (!out)
        {
            throw std::runtime_error("cannot open '" + csv_path + "' for writing");
        }
        write_csv(out, {r});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Certified upper bounds on two-party Bell functionals"};
    app.require_subcommand(1);

    int level = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string csv_path;
    std::string json_path;
    SolverFlags solver;
    SourceFlags source;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--level", level, "NPA level")->check(CLI::Range(1, 64));
        cmd->add_option("--seed", seed, "Seed for random functionals (base seed for bench)");
        cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
        solver.add_to(*cmd);
    };

    auto* solve_cmd = app.add_subcommand("solve", "Bound one functional");
    add_common(solve_cmd);
    source.add_to(*solve_cmd);
    solve_cmd->add_option("--csv", csv_path, "Write a CSV record");
    solve_cmd->add_option("--json", json_path, "Write a JSON report");

    auto* bench_cmd = app.add_subcommand("bench", "Scaling sweep over random R_xx22 functionals");
    add_common(bench_cmd);
    std::vector<int> xs{10, 20, 40, 80, 130};
    int runs = 10;
    int reference_refine = 0;
    bench_cmd->add_option("--x", xs, "Settings per side, e.g. --x 10,20,40")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--runs", runs, "Runs per x (seeds base..base+runs-1)")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--reference-refine", reference_refine,
                          "Deep-refinement steps for the reference bound (0 = no gap column)")
        ->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--csv", csv_path, "CSV output (default: stdout)");

    auto* gen_cmd = app.add_subcommand("gen", "Write a random R_xx22 functional");
    int gen_x = 0;
    std::string out_path;
    gen_cmd->add_option("--x", gen_x, "Settings per side")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", seed, "Seed");
    gen_cmd->add_option("--out", out_path, "Output path")->required();

    auto* export_cmd = app.add_subcommand("export", "Write the NPA SDP in sparse SDPA format");
    export_cmd->add_option("--level", level, "NPA level")->check(CLI::Range(1, 64));
    export_cmd->add_option("--seed", seed, "Seed for --random");
    source.add_to(*export_cmd);
    export_cmd->add_option("--out", out_path, "Output .dat-s path")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*solve_cmd)
        {
            return run_solve(source, solver, level, seed, csv_path, json_path);
        }
        if (*bench_cmd)
        {
            BenchOptions options;
            options.xs = xs;
            options.runs = runs;
            options.level = level;
            options.base_seed = seed;
            options.solver = solver.config();
            options.reference_refine = reference_refine;
            options.threads = threads;
            const auto records = run_bench(options);
            if (csv_path.empty())
            {
                write_csv(std::cout, records);
            }
            else
            {
                std::ofstream out(csv_path);
                if (!out)
                {
                    throw std::runtime_error("cannot open '" + csv_path + "' for writing");
                }
                write_csv(out, records);
            }
            bool any_ok = false;
            for (const auto& r : records)
            {
                if (r.agg.empty() && !r.failed())
                {
                    any_ok = true;
                }
                else if (r.failed())
                {
                    std::cerr << "warning: " << r.instance << ": " << r.error << '\n';
                }
            }
            return any_ok ? 0 : 1;
        }
        if (*gen_cmd)
        {
            std::ofstream out(out_path);
            if (!out)
            {
                throw std::runtime_error("cannot open '" + out_path + "' for writing");
            }
            out << serialize_functional(random_rxx22(gen_x, seed));
            out.flush();
            if (!out)
            {
                throw std::runtime_error("failed writing '" + out_path + "'");
            }
            return 0;
        }
        if (*export_cmd)
        {
            const auto [f, name] = source.load(seed);
            write_sdpa(assemble_primal<double>(f, build_moment_matrix(f.scenario, level)), out_path);
            return 0;
        }
    }
    catch (const CLI::Error& e)
    {
        return app.exit(e);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
