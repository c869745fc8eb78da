// Command-line front end: synth, verify, run, compare, demo.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "etc/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Secure event-triggered consensus: synthesis, verification and simulation"};
    app.require_subcommand(1);

    std::string config, gains, out;
    std::optional<std::uint64_t> seed;
    std::vector<std::uint64_t> seeds;
    std::string protocol = "proposed";

    auto* synth = app.add_subcommand("synth", "design gains and write gains.json");
    synth->add_option("--config", config, "scenario JSON")->required();
    synth->add_option("--out", out, "gains file to write")->required();

    auto* verify = app.add_subcommand("verify", "check design conditions for a gain file");
    verify->add_option("--config", config, "scenario JSON")->required();
    verify->add_option("--gains", gains, "gains JSON")->required();

    auto* run = app.add_subcommand("run", "simulate one seed and write trace.csv and summary.json");
    run->add_option("--config", config, "scenario JSON")->required();
    run->add_option("--gains", gains, "gains JSON")->required();
    run->add_option("--seed", seed, "seed (overrides ETC_SEED and the config)");
    run->add_option("--out", out, "output directory")->required();
    run->add_option("--protocol", protocol, "proposed or baseline")
        ->check(CLI::IsMember({"proposed", "baseline"}));

    auto* compare = app.add_subcommand("compare", "paired proposed/baseline runs");
    compare->add_option("--config", config, "scenario JSON")->required();
    compare->add_option("--gains", gains, "gains JSON")->required();
    compare->add_option("--seeds", seeds, "comma separated seeds")->required()->delimiter(',');

    auto* demo = app.add_subcommand("demo", "full replication bundle for the embedded scenario");
    demo->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : etc::exit_code::usage;
    }

    etc::Streams io{std::cout, std::cerr};
    if (*synth) return etc::cmd_synth(config, out, io);
    if (*verify) return etc::cmd_verify(config, gains, io);
    if (*run)
        return etc::cmd_run(config, gains, seed, out, io,
                            protocol == "baseline" ? etc::Protocol::baseline : etc::Protocol::proposed);
    if (*compare) return etc::cmd_compare(config, gains, seeds, io);
    if (*demo) return etc::cmd_demo(out, io);
    return etc::exit_code::usage;
}
