#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "wirecalc/commands.hpp"

namespace {

int load_workspace(const std::string& path, wirecalc::Workspace& ws) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        ws = wirecalc::parse_workspace(buf.str(), path);
    } catch (const wirecalc::DiagnosticsError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << d.to_string() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wirecalc: compositional open dynamical systems and steady-state matrices"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string file;
    wirecalc::CommandOptions opt;
    std::vector<std::string> with_args;

    app.add_option("--file", file, "workspace file (.wd)");
    app.add_option("--plan", opt.plan, "composition plan: tensor-then-wire|serial-chain");
    app.add_option("--format", opt.format, "output format: text|machine");
    app.add_option("--eps", opt.eps, "Euler step size");
    app.add_option("--jobs", opt.jobs, "worker threads for steady-state scans");
    app.add_option("--seed", opt.seed, "random seed");
    app.add_option("--tol", opt.tol, "numeric tolerance");

    auto add_target = [&](CLI::App* cmd) {
        cmd->add_option("target", opt.target, "named system or matrix");
        cmd->add_option("--wiring", opt.wiring, "wiring declaration to instantiate");
        cmd->add_option("--with", with_args, "slot=inhabitant bindings")->delimiter(',');
        cmd->add_option("--mode", opt.mode, "pipeline: matrix|brute");
    };

    CLI::App* parse_cmd = app.add_subcommand("parse", "parse and validate a workspace");
    CLI::App* run_cmd = app.add_subcommand("run", "execute the workspace's embedded commands");
    CLI::App* stst = app.add_subcommand("stst", "steady-state count matrix");
    add_target(stst);
    CLI::App* sets = app.add_subcommand("stst-sets", "steady-state set matrix");
    add_target(sets);
    CLI::App* measure = app.add_subcommand("stst-measure", "steady-state measure matrix");
    add_target(measure);
    CLI::App* comp = app.add_subcommand("compose", "compose inhabitants along a wiring");
    add_target(comp);
    CLI::App* stream = app.add_subcommand("stream", "run a discrete system on an input stream");
    stream->add_option("target", opt.target, "discrete system");
    stream->add_option("--init", opt.init, "initial state")->required();
    stream->add_option("--inputs", opt.inputs, "input stream, e.g. T,T,F");
    CLI::App* eul = app.add_subcommand("euler", "run the Euler discretization");
    eul->add_option("target", opt.target, "continuous system");
    eul->add_option("--init", opt.init, "initial state coordinates");
    eul->add_option("--inputs", opt.inputs, "input points separated by '/'");
    CLI::App* roots = app.add_subcommand("roots", "steady states of a continuous system");
    roots->add_option("target", opt.target, "continuous system");
    roots->add_option("--at", opt.at, "input point")->required();
    roots->add_option("--root-mode", opt.root_mode, "affine|newton");
    CLI::App* lin = app.add_subcommand("linearize", "Jacobians at a state or at steady states");
    lin->add_option("target", opt.target, "continuous system");
    lin->add_option("--at", opt.at, "input point")->required();
    lin->add_option("--state", opt.state, "state coordinates (else: at steady states)");
    lin->add_option("--root-mode", opt.root_mode, "affine|newton");
    CLI::App* stab = app.add_subcommand("stability", "classify linear stability");
    stab->add_option("target", opt.target, "linear or continuous system");
    stab->add_option("--at", opt.at, "input point (continuous)");
    stab->add_option("--state", opt.state, "state coordinates (continuous)");
    CLI::App* check = app.add_subcommand("check-compositional",
                                         "verify the compositionality laws on random instances");
    check->add_option("--trials", opt.trials, "instances per law");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage problems are diagnostics
    }

    for (const auto& a : with_args) {
        auto eq = a.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --with needs slot=name\n";
            return 1;
        }
        opt.with.emplace_back(a.substr(0, eq), a.substr(eq + 1));
    }

    CLI::App* sub = app.get_subcommands().front();
    std::string verb = sub->get_name();

    wirecalc::Workspace ws;
    bool needs_file = verb != "check-compositional";
    if (needs_file) {
        if (file.empty()) {
            std::cerr << "error: --file is required for '" << verb << "'\n";
            return 1;
        }
        if (int rc = load_workspace(file, ws)) return rc;
    }

    if (verb == "parse") {
        std::cout << "ok: " << ws.boxes.size() << " box(es), " << ws.wirings.size()
                  << " wiring(s), "
                  << ws.discrete_systems.size() + ws.weighted_systems.size() +
                         ws.continuous_systems.size() + ws.linear_systems.size()
                  << " system(s), " << ws.nat_matrices.size() + ws.real_matrices.size()
                  << " matrix(es)\n";
        return 0;
    }
    if (verb == "run") {
        wirecalc::CommandResult r = wirecalc::run_all_embedded(ws);
        std::cout << r.output;
        return r.exit_code;
    }
    wirecalc::CommandResult r = wirecalc::run_command(ws, verb, opt);
    std::cout << r.output;
    return r.exit_code;
}
