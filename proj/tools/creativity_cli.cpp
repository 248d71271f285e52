#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include <fmt/format.h>

#include "creativity/commands.hpp"
#include "creativity/errors.hpp"

namespace {

enum ExitCode { ok = 0, usage = 1, data = 2, numeric = 3 };

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta;
    std::optional<unsigned> threads;
    bool strict = false;
    std::string combinations;
    std::string measure;
};

creativity::EngineConfig resolve_config(const Overrides& o, bool required) {
    using namespace creativity;
    EngineConfig config;
    if (!o.config.empty()) {
        config = load_engine_config(o.config);
    } else if (required) {
        throw UsageError("--config is required");
    }
    try {
        if (o.seed) config.seed = *o.seed;
        if (o.beta) config.graph.beta = *o.beta;
        if (o.threads) config.threads = *o.threads;
        if (!o.combinations.empty()) config.combinations = parse_combination_list(o.combinations);
        if (!o.measure.empty()) config.unexpectedness.measure = parse_measure(o.measure);
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }
    config.strict = o.strict;
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Creativity scoring and rating-prediction benchmark"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--config", o.config, "JSON engine config");
    app.add_option("--seed", o.seed, "split and synthesis seed");
    app.add_option("--beta", o.beta, "novelty/influence balance in [0,1]");
    app.add_option("--threads", o.threads, "worker pool size (0 = hardware)");
    app.add_flag("--strict", o.strict, "fail on non-converged graphs");
    app.add_option("--combinations", o.combinations, "comma separated feature combinations");
    app.add_option("--measure", o.measure, "unexpectedness feature measure")
        ->check(CLI::IsMember({"max", "mean", "inverse_weighted"}));

    auto* ingest = app.add_subcommand("ingest", "load, impute and normalize the corpus");
    auto* scores = app.add_subcommand("scores", "similarity graphs, creativity and unexpectedness scores");
    auto* benchmark = app.add_subcommand("benchmark", "RMSE benchmark over feature combinations");
    auto* correlate = app.add_subcommand("correlate", "Pearson correlations of scores with labels");
    auto* synth = app.add_subcommand("synth", "emit a synthetic corpus and config");

    creativity::SynthRequest request;
    std::string rule = "novelty_driven";
    synth->add_option("--m", request.m, "number of artifacts");
    synth->add_option("--attributes", request.attributes, "number of attributes");
    synth->add_option("--label-rule", rule, "value_only, novelty_driven or unexpectedness_driven");
    synth->add_option("--out", request.output_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (synth->parsed()) {
            auto config = resolve_config(o, false);
            request.seed = config.seed;
            try {
                request.rule = creativity::parse_label_rule(rule);
            } catch (const creativity::ArgumentError& e) {
                throw creativity::UsageError(e.what());
            }
            creativity::cmd_synth(request, config, std::cout);
            return ok;
        }
        const auto config = resolve_config(o, true);
        if (ingest->parsed()) creativity::cmd_ingest(config, std::cout);
        if (scores->parsed()) creativity::cmd_scores(config, std::cout);
        if (benchmark->parsed()) creativity::cmd_benchmark(config, std::cout);
        if (correlate->parsed()) creativity::cmd_correlate(config, std::cout);
        return ok;
    } catch (const creativity::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const creativity::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return data;
    }
}
