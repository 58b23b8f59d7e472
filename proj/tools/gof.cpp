// gof: goodness-of-fit tables, file tests, and curve dumps.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gof/harness.hpp"

namespace {

// Accepts plain integers and forms such as 1e4.
std::vector<std::size_t> parse_n_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::istringstream in(text);
    for (std::string tok; std::getline(in, tok, ',');) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw gof::DomainError("bad sample size '" + tok + "'");
        }
        if (used != tok.size() || !(v >= 1) || v != std::floor(v) || v > 1e15)
            throw gof::DomainError("bad sample size '" + tok + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw gof::DomainError("empty --n list");
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gof::DomainError("cannot write '" + path + "'");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Goodness-of-fit tests U, V and W for a density p"};
    app.require_subcommand(1);

    std::string example, n_text, out_path, trials_path;
    std::uint64_t seed = 1;
    std::size_t trials = 33;
    auto* table = app.add_subcommand("table", "Monte Carlo table of U, V, W for a builtin example");
    table->add_option("--example", example, "sawtooth, step, step2, bimodal or smooth")->required();
    table->add_option("--n", n_text, "comma-separated sample sizes (default 10,100,1000,10000,100000)");
    table->add_option("--seed", seed, "base seed; trial i uses seed + i")->capture_default_str();
    table->add_option("--trials", trials, "trials per sample size")->capture_default_str();
    table->add_option("--out", out_path, "CSV output path")->required();
    table->add_option("--detail", trials_path, "optional CSV of every trial");

    std::string samples_path, density_spec, stats_text = "u,v,w", report_path;
    auto* test = app.add_subcommand("test", "Test a sample file against a density");
    test->add_option("--samples", samples_path, "one draw per line; '# key=value' metadata")->required();
    test->add_option("--density", density_spec, "builtin:NAME, builtin:NAME:alt, or a spec file")->required();
    test->add_option("--stats", stats_text, "subset of u,v,w,wtilde")->capture_default_str();
    test->add_option("--out", report_path, "report path (.csv for a CSV row, key=value otherwise)");

    std::string df_example, df_dir;
    std::size_t points = 1001;
    auto* df = app.add_subcommand("df", "Write pdf, CDF and distribution function of p(X) as CSV curves");
    df->add_option("--example", df_example, "builtin example name")->required();
    df->add_option("--points", points, "grid points per curve")->capture_default_str();
    df->add_option("--out", df_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*table) {
            std::vector<std::size_t> n_list(gof::kDefaultNList.begin(), gof::kDefaultNList.end());
            if (!n_text.empty()) n_list = parse_n_list(n_text);
            const auto result = gof::run_table(example, n_list, seed, trials);
            auto out = open_out(out_path);
            gof::write_table_csv(out, result);
            if (!trials_path.empty()) {
                auto detail = open_out(trials_path);
                gof::write_trials_csv(detail, result);
            }
            gof::print_table(std::cout, result);
        } else if (*test) {
            const auto stats = gof::parse_stats(stats_text);
            std::ifstream in(samples_path);
            if (!in) throw gof::DomainError("cannot open samples file '" + samples_path + "'");
            const auto samples = gof::read_samples(in, samples_path);
            const auto density = gof::resolve_density(density_spec);
            const auto outcome = gof::run_test(samples, density, stats);
            for (const auto& w : outcome.report.warnings) std::cerr << "warning: " << w << "\n";
            for (const auto& v : outcome.verdicts) std::cout << v << "\n";
            if (!report_path.empty()) {
                auto out = open_out(report_path);
                if (report_path.size() >= 4 && report_path.ends_with(".csv"))
                    out << gof::TestReport::csv_header() << "\n" << outcome.report.csv_row() << "\n";
                else
                    out << outcome.report.to_key_value();
            }
        } else if (*df) {
            for (const auto& p : gof::emit_curves(df_example, points, df_dir)) std::cout << p.string() << "\n";
        }
    } catch (const gof::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const gof::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
