#include "rajchman/commands.hpp"

#include <CLI/CLI.hpp>

#include <iostream>
#include <string>
#include <vector>

using namespace rajchman;

int main(int argc, char** argv) {
    CLI::App app{"rajchman: verifiable laboratory for the measure mu[K, eps]"};
    app.require_subcommand(1);

    std::string config_path, out, format, eta_range, x_source = "zero";
    std::uint64_t seed = 0, r = 3, N = 0;
    bool seed_set = false;
    double tol = 0;
    unsigned threads = 0;
    std::vector<std::string> eta_strs;
    std::string h_str = "1";
    unsigned long b = 2;
    std::size_t ell = 2;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--tol", tol, "evaluator tolerance");
    app.add_option("--threads", threads, "worker pool size");
    app.add_option("--out", out, "output directory");
    app.add_option("--format", format, "csv or json");

    auto* sc_sample = app.add_subcommand("sample", "digit streams + cylinder frequencies");
    auto* sc_fourier = app.add_subcommand("fourier", "mu-hat table with bounds");
    sc_fourier->add_option("--eta", eta_strs, "frequencies (decimal, repeatable)");
    auto* sc_weyl = app.add_subcommand("weyl", "exponential sum trace");
    sc_weyl->set_help_flag("--help", "print help");  // frees -h for --h below
    sc_weyl->add_option("--b", b, "base");
    sc_weyl->add_option("--h", h_str, "frequency multiplier");
    sc_weyl->add_option("--N", N, "sum length");
    sc_weyl->add_option("--x", x_source, "x source: zero | half | sample");
    auto* sc_cert = app.add_subcommand("certify-nonnormal", "even-base certificate");
    sc_cert->add_option("--b", b, "even base");
    sc_cert->add_option("--ell", ell, "conditioned block index");
    auto* sc_del = app.add_subcommand("del", "double-sum decomposition and series");
    sc_del->set_help_flag("--help", "print help");
    sc_del->add_option("--h", h_str, "h");
    sc_del->add_option("--r", r, "odd base r");
    auto* sc_lemmas = app.add_subcommand("verify-lemmas", "lemma verification suites");
    auto* sc_adm = app.add_subcommand("admissibility", "parameter admissibility report");
    // global flags may appear after the subcommand name
    for (auto* sc : app.get_subcommands({})) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
        if (seed_set) cfg.seed = seed;
        if (tol > 0) cfg.tol = tol;
        if (threads > 0) cfg.threads = threads;
        if (!out.empty()) cfg.out = out;
        if (!format.empty()) cfg.format = format;
        if (cfg.format != "csv" && cfg.format != "json") {
            std::cerr << "bad --format\n";
            return 2;
        }

        std::ostream& log = std::cout;
        if (sc_sample->parsed()) return cmd_sample(cfg, log);
        if (sc_fourier->parsed()) {
            std::vector<Int> etas;
            for (const auto& s : eta_strs) etas.emplace_back(s);
            if (etas.empty()) etas = {Int(0), Int(1), Int(100), Int(12345)};
            return cmd_fourier(cfg, etas, log);
        }
        if (sc_weyl->parsed()) {
            if (N == 0) N = 100;
            return cmd_weyl(cfg, x_source, b, Int(h_str), N, log);
        }
        if (sc_cert->parsed()) return cmd_certify(cfg, b, ell, log);
        if (sc_del->parsed()) return cmd_del(cfg, Int(h_str), r, log);
        if (sc_lemmas->parsed()) return cmd_verify_lemmas(cfg, log);
        if (sc_adm->parsed()) return cmd_admissibility(cfg, log);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
