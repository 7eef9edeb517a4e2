#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <safe_mpomdp/cli.hpp>

namespace cli = safe_mpomdp::cli;

namespace {

template <class T>
void opt(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& help) {
    app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Belief-space safe planning for multi-agent POMDPs"};
    app.require_subcommand(1);

    cli::RunRequest run;
    auto* run_cmd = app.add_subcommand("run", "run missions and write one JSONL trace per seed");
    run_cmd->add_option("--scenario", run.scenario, "scenario JSON file")->required();
    opt(run_cmd, "--algorithm", run.overrides.algorithm, "greedy | per-agent | filter | nominal");
    opt(run_cmd, "--horizon", run.overrides.horizon, "maximum number of steps");
    opt(run_cmd, "--theta", run.overrides.theta, "safety threshold");
    opt(run_cmd, "--alpha0", run.overrides.alpha0, "constant barrier decay rate");
    auto* seeds = run_cmd->add_option_function<std::size_t>("--seeds", [&](std::size_t n) { run.seeds = n; },
                                                            "number of consecutive seeds");
    run_cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t k) { run.seed = k; }, "single seed")
        ->excludes(seeds);
    opt(run_cmd, "--out", run.out_dir, std::string("output directory (default $") + cli::kOutDirEnv + " or ./traces)");
    run_cmd->add_flag("--emit-beliefs", run.emit_beliefs, "store full beliefs in the trace");

    cli::VerifyRequest verify;
    auto* verify_cmd = app.add_subcommand("verify", "re-check the barrier condition along a trace");
    verify_cmd->add_option("trace", verify.trace, "trace file")->required();
    opt(verify_cmd, "--alpha0", verify.alpha0, "decay rate (default: the one recorded in the trace)");
    opt(verify_cmd, "--scenario", verify.scenario, "recompute barrier values from recorded beliefs");

    cli::CompareRequest compare;
    auto* compare_cmd = app.add_subcommand("compare", "paired nominal vs filtered runs");
    compare_cmd->add_option("--scenario", compare.scenario, "scenario JSON file")->required();
    opt(compare_cmd, "--horizon", compare.overrides.horizon, "maximum number of steps");
    opt(compare_cmd, "--theta", compare.overrides.theta, "safety threshold");
    opt(compare_cmd, "--alpha0", compare.overrides.alpha0, "constant barrier decay rate");
    auto* cseeds = compare_cmd->add_option_function<std::size_t>(
        "--seeds", [&](std::size_t n) { compare.seeds = n; }, "number of consecutive seeds");
    compare_cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t k) { compare.seed = k; }, "single seed")
        ->excludes(cseeds);
    opt(compare_cmd, "--out", compare.out_dir, "output directory");
    compare_cmd->add_flag("--emit-beliefs", compare.emit_beliefs, "store full beliefs in the traces");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitConfig;
    }

    if (*run_cmd) return cli::cmd_run(run, std::cout, std::cerr);
    if (*verify_cmd) return cli::cmd_verify(verify, std::cout, std::cerr);
    return cli::cmd_compare(compare, std::cout, std::cerr);
}
