// Command-line front end: steady-state reports, figure-grid sweeps,
// trajectory runs, and the validation suite.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optmol/dynamics.hpp"
#include "optmol/format.hpp"
#include "optmol/observables.hpp"
#include "optmol/steady.hpp"
#include "optmol/sweep.hpp"
#include "optmol/validate.hpp"

namespace {

using nlohmann::json;
using namespace optmol;

// Numeric JSON fields are written by hand so every value carries the full
// 17 significant digits and output stays byte-reproducible.
void emit_json_object(std::ostream& os,
                      const std::vector<std::pair<std::string, std::string>>& fields) {
    os << "{\n";
    for (std::size_t i = 0; i < fields.size(); ++i)
        os << "  \"" << fields[i].first << "\": " << fields[i].second
           << (i + 1 < fields.size() ? "," : "") << "\n";
    os << "}\n";
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* os = &std::cout;

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot open output file: " + path);
        os = &file;
    }
};

json load_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) throw std::invalid_argument(std::string("cannot read config file: ") +
                                                 argv[i + 1]);
            return json::parse(in);
        }
    }
    return json::object();
}

struct CommonOpts {
    SystemParams params;
    double qfi_step = 1e-6;
    std::string out;
    std::string config;  // consumed by load_config; kept so CLI11 accepts the flag
    int threads = 1;
    // Option handles, so preset logic can tell explicit flags from defaults.
    CLI::Option* omega_opt = nullptr;
    CLI::Option* lambda_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* ta_opt = nullptr;
    CLI::Option* tb_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o, const json& cfg) {
    o.params.omega = cfg.value("omega", o.params.omega);
    o.params.lambda = cfg.value("lambda", o.params.lambda);
    o.params.gamma = cfg.value("gamma", o.params.gamma);
    o.params.t_a = cfg.value("ta", o.params.t_a);
    o.params.t_b = cfg.value("tb", o.params.t_b);
    o.qfi_step = cfg.value("qfi_step", o.qfi_step);
    o.threads = cfg.value("threads", o.threads);
    o.out = cfg.value("out", o.out);
    o.omega_opt = cmd->add_option("--omega", o.params.omega, "cavity frequency (energy unit)")
                      ->capture_default_str();
    o.lambda_opt =
        cmd->add_option("--lambda", o.params.lambda, "inter-cavity coupling")->capture_default_str();
    o.gamma_opt =
        cmd->add_option("--gamma", o.params.gamma, "reservoir coupling rate")->capture_default_str();
    o.ta_opt =
        cmd->add_option("--ta", o.params.t_a, "temperature of reservoir a")->capture_default_str();
    o.tb_opt =
        cmd->add_option("--tb", o.params.t_b, "temperature of reservoir b")->capture_default_str();
    cmd->add_option("--qfi-step", o.qfi_step, "finite-difference step for the QFI")
        ->capture_default_str();
    cmd->add_option("--out", o.out, "output path (default: stdout)");
    cmd->add_option("--config", o.config, "JSON config file; flags override its values");
    cmd->add_option("--threads", o.threads, "worker threads for sweeps")->capture_default_str();
}

SweepAxis axis_from_json(const json& j, const std::string& fallback_name) {
    const std::string name = j.value("name", fallback_name);
    if (j.contains("values"))
        return SweepAxis::explicit_values(name, j["values"].get<std::vector<double>>());
    return SweepAxis::linspace(name, j.value("min", 0.0), j.value("max", 0.8),
                               j.value("count", 2));
}

int run_steady(const CommonOpts& o) {
    o.params.validate();
    OutputTarget target;
    target.open(o.out);
    const DerivedParams d = derive_params(o.params);
    const SteadyState ss = steady_analytic(d, o.params.gamma);
    QfiOptions qfi_opts;
    qfi_opts.step = o.qfi_step;
    const ObservablesRecord rec = evaluate_observables(o.params, qfi_opts);
    // populations are clamped to [0, 1] for reporting only
    const auto pop = [&](int i) {
        return format_full(std::min(1.0, std::max(0.0, ss.populations(i))));
    };
    emit_json_object(*target.os,
                     {{"omega", format_full(o.params.omega)},
                      {"lambda", format_full(o.params.lambda)},
                      {"gamma", format_full(o.params.gamma)},
                      {"ta", format_full(o.params.t_a)},
                      {"tb", format_full(o.params.t_b)},
                      {"rho_gg", pop(0)},
                      {"rho_ee", pop(1)},
                      {"rho_ff", pop(2)},
                      {"re_rho_ef", format_full(ss.coherence.real())},
                      {"im_rho_ef", format_full(ss.coherence.imag())},
                      {"normalization", format_full(ss.normalization)},
                      {"coherence_abs", format_full(rec.coherence_abs)},
                      {"qfi", format_full(rec.qfi)},
                      {"j_curl", format_full(rec.j_curl)},
                      {"j_a", format_full(rec.j_a)},
                      {"j_b", format_full(rec.j_b)},
                      {"j_a_p", format_full(rec.j_a_p)},
                      {"j_b_p", format_full(rec.j_b_p)},
                      {"j_a_c", format_full(rec.j_a_c)},
                      {"j_b_c", format_full(rec.j_b_c)},
                      {"epr", format_full(rec.epr)}});
    return 0;
}

struct SweepOpts {
    std::string preset;
    std::string axis1_name, axis2_name;
    double axis1_min = 0, axis1_max = 0.8;
    double axis2_min = 0, axis2_max = 0.8;
    int axis1_count = 0, axis2_count = 0;
    std::string outputs;
};

int run_sweep_cmd(const CommonOpts& o, const SweepOpts& s, const json& cfg) {
    SweepConfig config;
    const std::string preset = !s.preset.empty() ? s.preset : cfg.value("preset", "");
    if (!preset.empty()) {
        config = preset_sweep(preset);
    } else if (!s.axis1_name.empty()) {
        config.axis1 = SweepAxis::linspace(s.axis1_name, s.axis1_min, s.axis1_max,
                                           s.axis1_count > 0 ? s.axis1_count : 2);
        if (!s.axis2_name.empty())
            config.axis2 = SweepAxis::linspace(s.axis2_name, s.axis2_min, s.axis2_max,
                                               s.axis2_count > 0 ? s.axis2_count : 2);
    } else if (cfg.contains("axis1")) {
        config.axis1 = axis_from_json(cfg["axis1"], "delta_t");
        if (cfg.contains("axis2")) config.axis2 = axis_from_json(cfg["axis2"], "lambda");
    } else {
        throw std::invalid_argument("sweep needs --preset or an --axis1 specification");
    }
    if (preset.empty()) {
        config.base = o.params;
    } else {
        // Presets pin the figure parameters; explicit flags still override them.
        if (o.omega_opt->count() > 0) config.base.omega = o.params.omega;
        if (o.lambda_opt->count() > 0) config.base.lambda = o.params.lambda;
        if (o.gamma_opt->count() > 0) config.base.gamma = o.params.gamma;
        if (o.ta_opt->count() > 0) config.base.t_a = o.params.t_a;
        if (o.tb_opt->count() > 0) config.base.t_b = o.params.t_b;
    }
    config.qfi_step = o.qfi_step;
    config.threads = o.threads;
    if (!s.outputs.empty())
        config.outputs = parse_outputs(s.outputs);
    else if (cfg.contains("outputs"))
        config.outputs = parse_outputs(cfg["outputs"].get<std::string>());

    const std::vector<SweepRow> rows = run_sweep(config);
    OutputTarget target;
    target.open(o.out);
    write_sweep_csv(*target.os, rows, config.outputs);

    int failures = 0;
    for (const SweepRow& row : rows) {
        if (row.failed == 0) continue;
        ++failures;
        if (failures <= 5)
            std::cerr << "point (delta_t=" << format_full(row.delta_t) << ", lambda="
                      << format_full(row.lambda) << ") failed: " << row.error << "\n";
    }
    if (failures > 0) {
        std::cerr << failures << " of " << rows.size()
                  << " grid points failed internal consistency checks\n";
        return 1;
    }
    return 0;
}

struct DynamicsOpts {
    std::string initial = "ground";
    double t_final = 100.0;
    double dt = 0.01;
    std::vector<double> init_pops;
    std::vector<double> init_coh;
};

State3 initial_state(const DynamicsOpts& d) {
    State3 s;
    if (d.initial == "ground") {
        s.rho_gg = 1.0;
    } else if (d.initial == "mixed") {
        s.rho_gg = s.rho_ee = s.rho_ff = 1.0 / 3.0;
    } else if (d.initial == "excited-e") {
        s.rho_gg = 0.0;
        s.rho_ee = 1.0;
    } else if (d.initial == "excited-f") {
        s.rho_gg = 0.0;
        s.rho_ff = 1.0;
    } else if (d.initial == "custom") {
        if (d.init_pops.size() != 3)
            throw std::invalid_argument("custom initial state needs --init-pops g,e,f");
        s.rho_gg = d.init_pops[0];
        s.rho_ee = d.init_pops[1];
        s.rho_ff = d.init_pops[2];
        if (!d.init_coh.empty()) {
            if (d.init_coh.size() != 2)
                throw std::invalid_argument("--init-coh takes re,im of rho_ef");
            s.rho_ef = {d.init_coh[0], d.init_coh[1]};
        }
        if (std::abs(s.trace() - 1.0) > 1e-9)
            throw std::invalid_argument("custom populations must sum to 1");
    } else {
        throw std::invalid_argument("unknown initial state: " + d.initial);
    }
    return s;
}

int run_dynamics(const CommonOpts& o, const DynamicsOpts& dyn) {
    o.params.validate();
    const DerivedParams d = derive_params(o.params);
    const MasterEquation eq = MasterEquation::build(d, o.params.gamma);
    const Trajectory traj = evolve(initial_state(dyn), eq, dyn.t_final, dyn.dt);

    OutputTarget target;
    target.open(o.out);
    std::ostream& os = *target.os;
    os << "t,rho_gg,rho_ee,rho_ff,re_rho_ef,im_rho_ef,abs_rho_ge,abs_rho_gf\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const State3& s = traj.states[i];
        os << format_full(traj.times[i]) << ',' << format_full(s.rho_gg) << ',' << format_full(s.rho_ee) << ','
           << format_full(s.rho_ff) << ',' << format_full(s.rho_ef.real()) << ',' << format_full(s.rho_ef.imag())
           << ',' << format_full(std::abs(s.rho_ge)) << ',' << format_full(std::abs(s.rho_gf)) << '\n';
    }
    return 0;
}

struct ValidateOpts {
    int grid_lambda = 20;
    int grid_delta_t = 20;
    bool fock = false;
    int n_max = 4;
    double corruption = 0.0;
};

int run_validate(const CommonOpts& o, const ValidateOpts& v) {
    ValidationOptions opts;
    opts.base = o.params;
    opts.grid_lambda = v.grid_lambda;
    opts.grid_delta_t = v.grid_delta_t;
    opts.fock = v.fock;
    opts.n_max = v.n_max;
    opts.corruption = v.corruption;
    const ValidationReport report = run_validation(opts);
    OutputTarget target;
    target.open(o.out);
    *target.os << report_to_json(report);
    if (!report.all_pass()) {
        for (const CheckResult& c : report.checks)
            if (!c.pass)
                std::cerr << "validation check failed: " << c.name
                          << " (residual " << format_full(c.residual) << ")\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonequilibrium steady states of a two-cavity optical molecule"};
    app.require_subcommand(1);

    try {
        const json cfg = load_config(argc, argv);

        CommonOpts steady_common, sweep_common, dynamics_common, validate_common;
        SweepOpts sweep_opts;
        DynamicsOpts dynamics_opts;
        ValidateOpts validate_opts;

        CLI::App* steady_cmd =
            app.add_subcommand("steady", "steady state and observables at one point (JSON)");
        add_common(steady_cmd, steady_common, cfg);

        CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep (CSV)");
        add_common(sweep_cmd, sweep_common, cfg);
        sweep_cmd->add_option("--preset", sweep_opts.preset,
                              "bundled grid: fig2a, fig2b, fig3, fig4");
        sweep_cmd->add_option("--axis1", sweep_opts.axis1_name, "first axis: delta_t or lambda");
        sweep_cmd->add_option("--axis1-min", sweep_opts.axis1_min);
        sweep_cmd->add_option("--axis1-max", sweep_opts.axis1_max);
        sweep_cmd->add_option("--axis1-count", sweep_opts.axis1_count);
        sweep_cmd->add_option("--axis2", sweep_opts.axis2_name, "optional second axis");
        sweep_cmd->add_option("--axis2-min", sweep_opts.axis2_min);
        sweep_cmd->add_option("--axis2-max", sweep_opts.axis2_max);
        sweep_cmd->add_option("--axis2-count", sweep_opts.axis2_count);
        sweep_cmd->add_option("--outputs", sweep_opts.outputs,
                              "comma-separated column subset (default: all)");

        CLI::App* dynamics_cmd = app.add_subcommand("dynamics", "trajectory run (CSV)");
        add_common(dynamics_cmd, dynamics_common, cfg);
        dynamics_cmd->add_option("--initial", dynamics_opts.initial,
                                 "ground | mixed | excited-e | excited-f | custom")
            ->capture_default_str();
        dynamics_cmd->add_option("--t-final", dynamics_opts.t_final)->capture_default_str();
        dynamics_cmd->add_option("--dt", dynamics_opts.dt)->capture_default_str();
        dynamics_cmd->add_option("--init-pops", dynamics_opts.init_pops,
                                 "custom populations g,e,f")
            ->delimiter(',');
        dynamics_cmd->add_option("--init-coh", dynamics_opts.init_coh,
                                 "custom coherence re,im")
            ->delimiter(',');

        CLI::App* validate_cmd =
            app.add_subcommand("validate", "invariant suite over a grid (JSON, exit 0 iff pass)");
        add_common(validate_cmd, validate_common, cfg);
        validate_cmd->add_option("--grid-lambda", validate_opts.grid_lambda)
            ->capture_default_str();
        validate_cmd->add_option("--grid-dt", validate_opts.grid_delta_t)
            ->capture_default_str();
        validate_cmd->add_flag("--fock", validate_opts.fock,
                               "include the truncated-Fock leakage check");
        validate_cmd->add_option("--nmax", validate_opts.n_max)->capture_default_str();
        validate_cmd->add_option("--corrupt-generator", validate_opts.corruption)
            ->group("");  // test hook, hidden from help

        app.parse(argc, argv);

        if (steady_cmd->parsed()) return run_steady(steady_common);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_common, sweep_opts, cfg);
        if (dynamics_cmd->parsed()) return run_dynamics(dynamics_common, dynamics_opts);
        if (validate_cmd->parsed()) return run_validate(validate_common, validate_opts);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help and friends
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
