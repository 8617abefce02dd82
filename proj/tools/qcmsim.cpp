// Command-line front end: evaluate arithmetic expressions through the
// ensemble-circuit pipeline, export gate traces, run finite-shot
// estimation, and run the built-in acceptance suite.
//
// Exit codes: 0 success, 1 parse/evaluation error, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "qcm/qcm.hpp"

namespace {

struct RunFlags {
    std::string expr;
    std::string mode = "exact";
    std::uint64_t shots = 100000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string renorm = "on";
    double den_floor = qcm::kDenFloor;
    double level = 0.95;
    std::string trace_path;
    bool json = false;
};

void add_run_options(CLI::App* cmd, RunFlags& f, bool trace_required) {
    cmd->add_option("expr", f.expr, "arithmetic expression, e.g. \"(2+3)*4\"")->required();
    cmd->add_option("--mode", f.mode, "evaluation mode")
        ->check(CLI::IsMember({"exact", "sampled"}))
        ->capture_default_str();
    cmd->add_option("--shots", f.shots, "measurement shots per qubit in sampled mode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", f.seed,
                    "sampling seed (std::mt19937_64 base; per-qubit streams are derived "
                    "with a SplitMix64-style mix). Auto-generated and echoed if omitted.");
    cmd->add_option("--renorm", f.renorm, "renormalize between expression nodes")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cmd->add_option("--den-floor", f.den_floor, "minimum decodable denominator magnitude")
        ->capture_default_str();
    cmd->add_option("--level", f.level, "confidence level for intervals")
        ->check(CLI::Range(0.5, 0.9999))
        ->capture_default_str();
    auto* trace = cmd->add_option("--trace", f.trace_path, "write the gate-event trace "
                                                           "(JSON lines) to this file");
    if (trace_required) trace->required();
    cmd->add_flag("--json", f.json, "emit one JSON report object on stdout");
}

void finalize_seed(RunFlags& f, const CLI::App* cmd) {
    f.seed_given = cmd->count("--seed") > 0;
    if (f.mode == "sampled" && !f.seed_given) {
        std::random_device rd;
        f.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        f.seed_given = true;
    }
}

qcm::EvalOptions to_options(const RunFlags& f) {
    qcm::EvalOptions opts;
    opts.mode = f.mode == "sampled" ? qcm::EvalMode::sampled : qcm::EvalMode::exact;
    opts.shots = f.shots;
    opts.seed = f.seed;
    opts.renorm = f.renorm == "on";
    opts.den_floor = f.den_floor;
    opts.ci_level = f.level;
    return opts;
}

void print_human(const qcm::EvalReport& rep) {
    std::cout << "exact:          " << rep.exact_value << '\n'
              << "circuit:        " << rep.circuit_value << '\n'
              << "abs err:        " << rep.abs_err << '\n'
              << "rel err:        " << rep.rel_err << '\n'
              << "physical gates: " << rep.physical_gates << '\n'
              << "clones:         " << rep.clones << '\n'
              << "renorms:        " << rep.renorms << '\n'
              << "components:     num " << rep.num_component << ", den " << rep.den_component
              << '\n';
    if (rep.estimate) {
        const auto& e = *rep.estimate;
        std::cout << "estimate:       " << e.point << " in [" << e.ci_low << ", " << e.ci_high
                  << "] (" << e.level * 100 << "% " << e.method << ", shots " << e.shots
                  << ", seed " << e.seed << ")\n";
    }
}

int run_expression(const RunFlags& flags, bool estimate_only) {
    const qcm::ExprPtr ast = qcm::parse(flags.expr);
    qcm::EnsembleStore store;
    const qcm::EvalReport rep = qcm::evaluate(store, ast, to_options(flags));

    if (!flags.trace_path.empty()) {
        std::ofstream out(flags.trace_path);
        if (!out) {
            std::cerr << "error: cannot open trace file: " << flags.trace_path << '\n';
            return 1;
        }
        store.write_trace(out);
    }

    if (estimate_only) {
        const auto& e = *rep.estimate;
        if (flags.json) {
            std::cout << e.to_json().dump() << '\n';
        } else {
            std::cout << "point:    " << e.point << '\n'
                      << "ci:       [" << e.ci_low << ", " << e.ci_high << "] (" << e.level * 100
                      << "%)\n"
                      << "method:   " << e.method << '\n'
                      << "shots:    " << e.shots << '\n'
                      << "seed:     " << e.seed << '\n'
                      << "exact:    " << rep.exact_value << '\n';
        }
        return 0;
    }

    if (flags.json) {
        std::cout << rep.to_json().dump() << '\n';
    } else {
        print_human(rep);
    }
    return 0;
}

int run_selftest(std::uint64_t seed) {
    const auto results = qcm::run_acceptance(seed);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << " " << r.index << ": " << r.name << ": "
                  << r.detail << '\n';
        all = all && r.passed;
    }
    std::cout << (all ? "all criteria passed" : "some criteria FAILED") << '\n';
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ensemble-circuit simulator: real numbers stored in qubit-ensemble "
                 "density matrices, arithmetic run as fixed gate circuits"};
    app.require_subcommand(1);

    RunFlags eval_flags, trace_flags, est_flags;
    std::uint64_t selftest_seed = qcm::kAcceptanceSeed;

    CLI::App* eval_cmd =
        app.add_subcommand("eval", "evaluate an expression and report circuit vs oracle");
    add_run_options(eval_cmd, eval_flags, false);

    CLI::App* trace_cmd =
        app.add_subcommand("trace", "evaluate and write the gate-event trace to a file");
    add_run_options(trace_cmd, trace_flags, true);

    CLI::App* est_cmd = app.add_subcommand(
        "estimate", "evaluate, then estimate the result from finite measurement shots");
    add_run_options(est_cmd, est_flags, false);

    CLI::App* self_cmd =
        app.add_subcommand("selftest", "run the built-in acceptance suite");
    self_cmd->add_option("--seed", selftest_seed, "base seed for the randomized checks")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, returns 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (eval_cmd->parsed()) {
            finalize_seed(eval_flags, eval_cmd);
            return run_expression(eval_flags, false);
        }
        if (trace_cmd->parsed()) {
            finalize_seed(trace_flags, trace_cmd);
            return run_expression(trace_flags, false);
        }
        if (est_cmd->parsed()) {
            est_flags.mode = "sampled";
            finalize_seed(est_flags, est_cmd);
            return run_expression(est_flags, true);
        }
        return run_selftest(selftest_seed);
    } catch (const qcm::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const qcm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
