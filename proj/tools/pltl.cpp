#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pltl/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Learn PLTL formulas separating two sets of Markov chains"};
    app.require_subcommand(1);

    pltl::cli::LearnOptions learn;
    std::size_t max_size = 0, max_depth = 0, bool_limit = 0, jobs = 0;
    double delta = 0.0;
    auto* learn_cmd = app.add_subcommand("learn", "Search for a minimal consistent formula");
    learn_cmd->add_option("--sample", learn.sample, "Sample manifest (JSON)")->required();
    auto* k_opt = learn_cmd->add_option("--max-size", max_size, "Size bound K");
    auto* d_opt = learn_cmd->add_option("--max-depth", max_depth, "Temporal depth bound D (default 2)");
    auto* delta_opt = learn_cmd->add_option("--delta", delta, "Margin tolerance (default 0.05)");
    auto* l_opt = learn_cmd->add_option("--bool-limit", bool_limit, "Heap prefix L for combinations (default 10)");
    auto* jobs_opt = learn_cmd->add_option("--jobs", jobs, "Worker threads for model checking");
    learn_cmd->add_flag("--stats", learn.stats, "Print phase timings to stderr");
    learn_cmd->add_flag("--all-minimal", learn.all_minimal, "Report every consistent formula of minimal size");
    learn_cmd->add_flag("--eager-return", learn.eager_return, "Stop at the first size with a solution");

    std::string model, formula;
    auto* check_cmd = app.add_subcommand("check", "Print Pr(formula) for every state of a chain");
    check_cmd->add_option("--model", model, "Chain file (.json, or .tra with sibling .lab)")->required();
    check_cmd->add_option("--formula", formula, "LTL formula")->required();

    std::string gen_name, out_dir;
    std::uint64_t seed = 0;
    std::vector<std::string> gen_params;
    auto* gen_cmd = app.add_subcommand("benchgen", "Write a planted-formula sample");
    gen_cmd->add_option("--name", gen_name, "Generator name")->required();
    gen_cmd->add_option("--seed", seed, "Random seed")->required();
    gen_cmd->add_option("--out", out_dir, "Output directory")->required();
    gen_cmd->add_option("--param", gen_params, "Generator parameter key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pltl::cli::kExitInputError;
    }

    if (*learn_cmd) {
        if (*k_opt) learn.max_size = max_size;
        if (*d_opt) learn.max_depth = max_depth;
        if (*delta_opt) learn.delta = delta;
        if (*l_opt) learn.bool_limit = bool_limit;
        if (*jobs_opt) learn.jobs = jobs;
        return pltl::cli::run_learn(learn, std::cout, std::cerr);
    }
    if (*check_cmd) return pltl::cli::run_check(model, formula, std::cout, std::cerr);

    pltl::bench::Params params;
    for (const auto& kv : gen_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --param expects key=value, got '" << kv << "'\n";
            return pltl::cli::kExitInputError;
        }
        params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return pltl::cli::run_benchgen(gen_name, seed, params, out_dir, std::cout, std::cerr);
}
