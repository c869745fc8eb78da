#include "etc/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <string>

#include "etc/io.hpp"

namespace etc {

namespace fs = std::filesystem;

std::optional<std::uint64_t> seed_from_env() {
    const char* v = std::getenv("ETC_SEED");
    if (v == nullptr || *v == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long s = std::stoull(v, &used);
        if (used != std::string(v).size()) return std::nullopt;
        return static_cast<std::uint64_t>(s);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

namespace {

void report_config_error(const ConfigError& e, const fs::path& path, std::ostream& err) {
    err << "error: " << path.string();
    if (e.line > 0) err << ":" << e.line << ":" << e.column;
    err << ": " << e.what() << '\n';
}

// Config is authoritative for the scenario-dependent constants; gains carry
// only the design matrices and the design scalars c, kappa.
GainSet bind_gains(const Scenario& sc, GainSet g) {
    g.structure = structural_constants(sc.topology, sc.chain, sc.attack);
    g.scalars = sc.scalars;
    g.c = sc.synthesis.c;
    g.kappa = sc.synthesis.kappa;
    return g;
}

SynthesisOutcome design(const Scenario& sc) {
    return synthesize_gains(sc.plant.A, sc.plant.B, sc.plant.C,
                            structural_constants(sc.topology, sc.chain, sc.attack), sc.scalars, sc.synthesis);
}

template <typename F>
int guarded(const fs::path& config, Streams io, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        report_config_error(e, config, io.err);
        return exit_code::io;
    } catch (const InvariantViolation& e) {
        io.err << "invariant violation at step " << e.step << ": " << e.what() << '\n';
        return exit_code::invariant;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << '\n';
        return exit_code::io;
    }
}

Json summary_json(const Scenario& sc, const Metrics& m, const VerificationReport& rep, double seconds) {
    Json j = metrics_to_json(m);
    j["digest"] = scenario_digest(sc);
    j["seed"] = sc.seed;
    j["verification"] = report_to_json(rep);
    j["wall_clock_s"] = seconds;
    return j;
}

void write_wide(const fs::path& path, const TimeSeries& ts, const std::function<double(std::size_t, int)>& value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const int agents = static_cast<int>(ts.x.front().cols());
    out << "t";
    for (int i = 1; i <= agents; ++i) out << ",agent" << i;
    out << '\n' << std::setprecision(12);
    for (std::size_t k = 0; k < ts.samples(); ++k) {
        out << ts.t[k];
        for (int i = 0; i < agents; ++i) out << ',' << value(k, i);
        out << '\n';
    }
}

void write_raster(const fs::path& path, const TimeSeries& ts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "agent_id,t\n" << std::setprecision(12);
    for (std::size_t i = 0; i < ts.events.size(); ++i)
        for (double t : ts.events[i]) out << i + 1 << ',' << t << '\n';
}

}  // namespace

std::vector<std::string> demo_series_files() {
    return {"positions_x.csv", "positions_y.csv",   "errors_x.csv",        "errors_y.csv",
            "coupling_strength.csv", "triggers_proposed.csv", "triggers_baseline.csv"};
}

int cmd_synth(const fs::path& config, const fs::path& gains_out, Streams io) {
    return guarded(config, io, [&] {
        const Scenario sc = load_scenario(config);
        const auto outcome = design(sc);
        if (outcome.gains.P.size() == 0 || outcome.gains.Q.size() == 0) {
            io.err << "infeasible: " << outcome.message << '\n';
            return exit_code::infeasible;
        }
        write_text_file(gains_out, gains_to_json(outcome.gains).dump(2) + "\n");
        io.out << format_report(outcome.report);
        io.out << "riccati residual: " << outcome.gains.riccati_residual << '\n';
        if (!outcome.feasible) {
            io.err << "infeasible: " << outcome.message << '\n';
            return exit_code::infeasible;
        }
        return exit_code::ok;
    });
}

int cmd_verify(const fs::path& config, const fs::path& gains, Streams io) {
    return guarded(config, io, [&] {
        const Scenario sc = load_scenario(config);
        GainSet g;
        try {
            g = load_gains(gains);
        } catch (const ConfigError& e) {
            report_config_error(e, gains, io.err);
            return exit_code::io;
        }
        g = bind_gains(sc, g);
        const auto rep = verify_theorem_conditions(sc.plant.A, sc.plant.B, sc.plant.C, g);
        io.out << format_report(rep);
        return rep.feasible ? exit_code::ok : exit_code::infeasible;
    });
}

int cmd_run(const fs::path& config, const fs::path& gains, std::optional<std::uint64_t> seed, const fs::path& out_dir,
            Streams io, Protocol protocol) {
    return guarded(config, io, [&] {
        Scenario sc = load_scenario(config);
        if (auto env = seed_from_env()) sc.seed = *env;
        if (seed) sc.seed = *seed;
        GainSet g;
        try {
            g = load_gains(gains);
        } catch (const ConfigError& e) {
            report_config_error(e, gains, io.err);
            return exit_code::io;
        }
        g = bind_gains(sc, g);
        const auto rep = verify_theorem_conditions(sc.plant.A, sc.plant.B, sc.plant.C, g);
        g.chi = rep.chi;
        if (!rep.feasible) io.err << "warning: design conditions not satisfied; running anyway\n";
        fs::create_directories(out_dir);
        const auto t0 = std::chrono::steady_clock::now();
        const RunResult r = protocol == Protocol::proposed ? run_scenario(sc, g) : run_baseline(sc, g);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_trace_csv(out_dir / "trace.csv", r.ts);
        write_text_file(out_dir / "summary.json", summary_json(sc, r.metrics, rep, secs).dump(2) + "\n");
        io.out << "steady_state_pos_error " << r.metrics.steady_state_pos_error << " m, triggers "
               << r.metrics.total_triggers << ", seed " << sc.seed << '\n';
        return exit_code::ok;
    });
}

int cmd_compare(const fs::path& config, const fs::path& gains, const std::vector<std::uint64_t>& seeds, Streams io) {
    if (seeds.empty()) {
        io.err << "usage: compare needs a non-empty --seeds list\n";
        return exit_code::usage;
    }
    return guarded(config, io, [&] {
        const Scenario sc = load_scenario(config);
        GainSet g = bind_gains(sc, load_gains(gains));
        g.chi = verify_theorem_conditions(sc.plant.A, sc.plant.B, sc.plant.C, g).chi;
        const auto prop = run_batch(sc, g, seeds, Protocol::proposed);
        const auto base = run_batch(sc, g, seeds, Protocol::baseline);
        io.out << std::setprecision(6);
        io.out << "seed,proposed_error_m,proposed_triggers,baseline_error_m,baseline_triggers\n";
        for (std::size_t k = 0; k < seeds.size(); ++k)
            io.out << seeds[k] << ',' << prop.runs[k].steady_state_pos_error << ',' << prop.runs[k].total_triggers
                   << ',' << base.runs[k].steady_state_pos_error << ',' << base.runs[k].total_triggers << '\n';
        auto line = [&](const char* name, const Aggregate& p, const Aggregate& b) {
            io.out << name << ": proposed " << p.mean;
            if (seeds.size() > 1) io.out << " +- " << p.stddev;
            io.out << ", baseline " << b.mean;
            if (seeds.size() > 1) io.out << " +- " << b.stddev;
            io.out << '\n';
        };
        line("mean steady-state error (m)", prop.steady_state_pos_error, base.steady_state_pos_error);
        line("mean trigger count", prop.total_triggers, base.total_triggers);
        const bool err_dom = base.steady_state_pos_error.mean > prop.steady_state_pos_error.mean;
        const bool trig_dom = base.total_triggers.mean > prop.total_triggers.mean;
        io.out << "baseline error larger: " << (err_dom ? "TRUE" : "FALSE") << '\n';
        io.out << "baseline triggers larger: " << (trig_dom ? "TRUE" : "FALSE") << '\n';
        return exit_code::ok;
    });
}

int cmd_demo(const fs::path& out_dir, Streams io) {
    return guarded("<embedded demo scenario>", io, [&] {
        fs::create_directories(out_dir / "series");
        const Json cfg = default_scenario_json();
        write_text_file(out_dir / "config.json", cfg.dump(2) + "\n");
        const Scenario sc = scenario_from_json(cfg);

        const auto outcome = design(sc);
        if (outcome.gains.P.size() == 0 || outcome.gains.Q.size() == 0) {
            io.err << "infeasible: " << outcome.message << '\n';
            return exit_code::infeasible;
        }
        const GainSet& g = outcome.gains;
        write_text_file(out_dir / "gains.json", gains_to_json(g).dump(2) + "\n");
        const std::string report = format_report(outcome.report);
        write_text_file(out_dir / "verification.txt", report);
        io.out << report;

        const auto t0 = std::chrono::steady_clock::now();
        const RunResult prop = run_scenario(sc, g);
        const double t_prop = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const RunResult base = run_baseline(sc, g);
        const double t_base = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() - t_prop;

        write_trace_csv(out_dir / "trace.csv", prop.ts);
        write_trace_csv(out_dir / "baseline_trace.csv", base.ts);
        write_text_file(out_dir / "summary.json",
                        summary_json(sc, prop.metrics, outcome.report, t_prop).dump(2) + "\n");
        write_text_file(out_dir / "baseline_summary.json",
                        summary_json(sc, base.metrics, outcome.report, t_base).dump(2) + "\n");

        const Matrix& C = sc.plant.C;
        const fs::path series = out_dir / "series";
        const auto& ts = prop.ts;
        write_wide(series / "positions_x.csv", ts, [&](std::size_t k, int i) { return ts.x[k](0, i); });
        write_wide(series / "positions_y.csv", ts, [&](std::size_t k, int i) { return ts.x[k](1, i); });
        std::vector<Matrix> err;
        for (const auto& x : ts.x) err.push_back(C * consensus_error(x));
        write_wide(series / "errors_x.csv", ts, [&](std::size_t k, int i) { return err[k](0, i); });
        write_wide(series / "errors_y.csv", ts, [&](std::size_t k, int i) { return err[k](1, i); });
        write_wide(series / "coupling_strength.csv", ts, [&](std::size_t k, int i) { return ts.d[k](i); });
        write_raster(series / "triggers_proposed.csv", ts);
        write_raster(series / "triggers_baseline.csv", base.ts);

        const auto& m = prop.metrics;
        const auto& b = base.metrics;
        auto check = [&](const char* name, bool ok) { io.out << (ok ? "PASS " : "FAIL ") << name << '\n'; };
        io.out << std::setprecision(6);
        io.out << "proposed: error " << m.steady_state_pos_error << " m, triggers " << m.total_triggers
               << ", mean gap " << m.mean_inter_event << " s\n";
        io.out << "baseline: error " << b.steady_state_pos_error << " m, triggers " << b.total_triggers << '\n';
        check("design conditions certified", outcome.feasible);
        check("steady-state position error < 0.5 m", m.steady_state_pos_error < 0.5);
        check("threshold variable stays positive", m.varpi_min && *m.varpi_min > 0);
        check("inter-event interval >= h", m.min_inter_event >= sc.h * (1 - 1e-9));
        check("mean inter-event interval >= 10h", m.mean_inter_event >= 10 * sc.h);
        check("baseline error larger", b.steady_state_pos_error > m.steady_state_pos_error);
        check("baseline trigger count larger", b.total_triggers > m.total_triggers);
        return exit_code::ok;
    });
}

}  // namespace etc
