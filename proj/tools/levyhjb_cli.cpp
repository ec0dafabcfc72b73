#include "levyhjb/problem.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal HJB solver and verifier for sublinear Levy processes"};
    std::string spec_path, out_dir = ".", mode;
    std::uint64_t seed = 0;
    bool quiet = false;
    app.add_option("--spec", spec_path, "problem file")->required();
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the problem file)");
    auto* mode_opt = app.add_option("--mode", mode, "run mode override");
    app.add_flag("--quiet", quiet, "suppress the summary line");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    levyhjb::ProblemSpec spec;
    try {
        spec = levyhjb::load_problem(spec_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    levyhjb::RunOptions opts;
    opts.out_dir = out_dir;
    opts.quiet = quiet;
    if (*seed_opt) opts.seed = seed;
    if (*mode_opt) opts.mode = mode;
    return levyhjb::run(spec, opts);
}
