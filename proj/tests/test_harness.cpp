#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "gof/harness.hpp"

using namespace gof;
namespace fs = std::filesystem;

namespace {

SampleSet of(std::vector<double> x) {
    SampleSet s;
    s.draws = std::move(x);
    return s;
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("gof_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::pair<double, double>> read_curve(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,value");
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return rows;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + GOF_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST(RunTable, LowSquareExactZeros) {
    const std::size_t ns[] = {100};
    auto t = run_table("step2", ns, 5, 4);
    ASSERT_EQ(t.rows.size(), 1u);
    ASSERT_EQ(t.detail.size(), 4u);
    for (const auto& r : t.detail) {
        EXPECT_EQ(r.v0, 0.0);
        EXPECT_EQ(r.w1, 0.0);
    }
    EXPECT_EQ(t.rows[0].v0.median, 0.0);
}

TEST(RunTable, DeterministicAndSeedSensitive) {
    const std::size_t ns[] = {50, 200};
    auto a = run_table("bimodal", ns, 11, 3), b = run_table("bimodal", ns, 11, 3, 2), c = run_table("bimodal", ns, 12, 3);
    std::ostringstream sa, sb, sc;
    write_table_csv(sa, a);
    write_table_csv(sb, b);
    write_table_csv(sc, c);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_NE(sa.str(), sc.str());
}

TEST(RunTable, TrialSeedsFollowBase) {
    const std::size_t ns[] = {20};
    auto t = run_table("smooth", ns, 100, 3);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(t.detail[i].seed, 100 + i);
    auto single = run_trial(builtin("smooth"), 20, 100, 2);
    EXPECT_EQ(single.u1, t.detail[2].u1);
    EXPECT_NE(trial_seeds(1, 0, 10).first, trial_seeds(1, 0, 10).second);
    EXPECT_NE(trial_seeds(1, 0, 10).first, trial_seeds(1, 0, 20).first);
}

TEST(RunTable, MediansAndQuartiles) {
    const std::size_t ns[] = {30};
    auto t = run_table("sawtooth", ns, 1, 5);
    std::vector<double> v;
    for (const auto& r : t.detail) v.push_back(r.v1);
    std::sort(v.begin(), v.end());
    EXPECT_EQ(t.rows[0].v1.median, v[2]);
    EXPECT_EQ(t.rows[0].v1.q1, v[1]);
    EXPECT_EQ(t.rows[0].v1.q3, v[3]);
}

TEST(RunTable, ResourceGuard) {
    const std::size_t ns[] = {1000000000};
    EXPECT_THROW(run_table("step", ns, 1, 2), DomainError);
    const std::size_t zero[] = {0};
    EXPECT_THROW(run_table("step", zero, 1, 1), DomainError);
    EXPECT_THROW(run_table("nope", std::span<const std::size_t>(kDefaultNList), 1, 1), DomainError);
}

TEST(RunTable, CsvLayout) {
    const std::size_t ns[] = {10, 20};
    auto t = run_table("step", ns, 3, 1);
    std::ostringstream os;
    write_table_csv(os, t);
    std::istringstream in(os.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header.rfind("example,seed,n,trials,u0,u0_raw,u0_q1,u0_q3,u1,", 0), 0u);
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
    EXPECT_EQ(row.rfind("step,3,10,1,", 0), 0u);
    EXPECT_EQ(sci3(25.0), "2.50e+01");
    EXPECT_EQ(sci3(0.0), "0.00e+00");
}

TEST(RunTest, UniformNoRejection) {
    auto dir = scratch("uniform");
    {
        std::ofstream spec(dir / "uniform.txt");
        spec << "support 0 1\n0 1 1\n";
    }
    auto d = resolve_density((dir / "uniform.txt").string());
    const Stat stats[] = {Stat::w};
    auto out = run_test(of({0.2, 0.4, 0.6, 0.8}), d, stats);
    ASSERT_TRUE(out.report.w);
    EXPECT_EQ(out.report.w->w, 4.0);
    ASSERT_EQ(out.verdicts.size(), 1u);
    EXPECT_NE(out.verdicts[0].find("no rejection"), std::string::npos);
}

TEST(RunTest, SawtoothSingleDrawConfidence) {
    auto d = resolve_density("builtin:sawtooth");
    const Stat stats[] = {Stat::w};
    auto out = run_test(of({500.0005}), d, stats);
    EXPECT_NEAR(out.report.w->w, 2.5e-7, 1e-10);
    EXPECT_NE(out.verdicts[0].find("≥ 99.99997% confidence"), std::string::npos) << out.verdicts[0];
}

TEST(RunTest, BimodalSingleDraw) {
    auto d = resolve_density("builtin:bimodal");
    const Stat stats[] = {Stat::u, Stat::v, Stat::w, Stat::wtilde};
    auto out = run_test(of({50.0}), d, stats);
    EXPECT_NEAR(out.report.w->w, 0.25, 1e-10);
    EXPECT_NE(out.verdicts[2].find("≥ 75% confidence"), std::string::npos) << out.verdicts[2];
    EXPECT_NE(out.verdicts[0].find("no rejection"), std::string::npos);
    EXPECT_TRUE(out.report.u && out.report.v && out.report.w_tilde);
}

TEST(RunTest, OutsideSupportWarns) {
    auto d = resolve_density("builtin:bimodal");
    const Stat stats[] = {Stat::w};
    auto out = run_test(of({50.0, 250.0}), d, stats);
    ASSERT_EQ(out.report.warnings.size(), 1u);
    EXPECT_NE(out.report.warnings[0].find("1 of 2"), std::string::npos);
    EXPECT_EQ(out.report.w->w, 0.0);
    EXPECT_EQ(out.report.w->min_index, 1u);
}

TEST(RunTest, ConfidencePercent) {
    EXPECT_EQ(confidence_percent(0.25), "75");
    EXPECT_EQ(confidence_percent(2.5e-7), "99.99997");
    EXPECT_EQ(confidence_percent(0.01), "99");
    EXPECT_EQ(confidence_percent(1e-3), "99.9");
}

TEST(ResolveDensity, Variants) {
    EXPECT_EQ(resolve_density("builtin:step").density.get(), &builtin("step").p);
    auto alt = resolve_density("builtin:step:alt");
    EXPECT_EQ(alt.name, "step:alt");
    EXPECT_DOUBLE_EQ((*alt.density)(10.5), 1.0 / 1999.0);
    EXPECT_THROW(resolve_density("builtin:step:beta"), DomainError);
    EXPECT_THROW(resolve_density("builtin:cauchy"), DomainError);
    EXPECT_THROW(resolve_density("/nonexistent/spec.txt"), DomainError);
    EXPECT_EQ(parse_stats("u,wtilde").size(), 2u);
    EXPECT_THROW(parse_stats("u,x"), DomainError);
}

TEST(EmitCurves, SawtoothDf) {
    auto dir = scratch("sawtooth");
    auto paths = emit_curves("sawtooth", 201, dir);
    ASSERT_EQ(paths.size(), 3u);
    EXPECT_EQ(paths[2].filename(), "sawtooth_df.csv");
    auto df = read_curve(paths[2]);
    ASSERT_EQ(df.size(), 201u);
    for (const auto& [x, v] : df) EXPECT_NEAR(v, 1e6 * x * x / 4.0, 1e-8);
    EXPECT_EQ(df.front().first, 0.0);
    EXPECT_NEAR(df.back().first, 2e-3, 1e-15);
}

TEST(EmitCurves, BimodalPdfShape) {
    auto dir = scratch("bimodal");
    auto pdf = read_curve(emit_curves("bimodal", 2021, dir)[0]);
    ASSERT_EQ(pdf.size(), 2021u);
    auto at = [&](double x) {
        for (const auto& [px, v] : pdf)
            if (std::abs(px - x) < 1e-9) return v;
        ADD_FAILURE() << "no grid point at " << x;
        return -1.0;
    };
    EXPECT_NEAR(at(100.0), 100.0 / 10100.0, 1e-12);
    EXPECT_NEAR(at(102.0), 100.0 / 10100.0, 1e-12);
    EXPECT_NEAR(at(101.0), 0.0, 1e-12);
    EXPECT_LT(at(100.5), at(100.0));
}

TEST(EmitCurves, StepJumpPair) {
    auto dir = scratch("step");
    auto df = read_curve(emit_curves("step", 11, dir)[2]);
    int pairs = 0;
    for (std::size_t i = 0; i + 1 < df.size(); ++i)
        if (df[i].first == 1e-3 && df[i + 1].first == 1e-3) {
            EXPECT_NEAR(df[i].second, 1e-3, 1e-15);
            EXPECT_NEAR(df[i + 1].second, 1.0, 1e-15);
            ++pairs;
        }
    EXPECT_EQ(pairs, 1);
    for (std::size_t i = 1; i < df.size(); ++i) EXPECT_LE(df[i - 1].first, df[i].first);
    EXPECT_THROW(emit_curves("step", 1, dir), DomainError);
}

TEST(Cli, ExitCodes) {
    auto dir = scratch("cli");
    const auto out = (dir / "t.csv").string();
    EXPECT_EQ(run_cli("table --example step2 --n 10,100 --seed 1 --trials 2 --out \"" + out + "\""), 0);
    EXPECT_TRUE(fs::exists(out));
    EXPECT_EQ(run_cli("table --example nope --out \"" + out + "\""), 1);
    EXPECT_EQ(run_cli("table --example step --n 1e9 --trials 2 --out \"" + out + "\""), 1);
    EXPECT_EQ(run_cli("table --example step --n 1.5 --out \"" + out + "\""), 1);
    EXPECT_EQ(run_cli("bogus"), 1);
    EXPECT_EQ(run_cli(""), 1);
    EXPECT_EQ(run_cli("--help"), 0);

    {
        std::ofstream s(dir / "samples.txt");
        s << "# seed=5\n# source=hand\n50\n";
        std::ofstream bad(dir / "bad.txt");
        bad << "50\nfifty\n";
    }
    const auto rep = (dir / "rep.txt").string();
    EXPECT_EQ(run_cli("test --samples \"" + (dir / "samples.txt").string() +
                      "\" --density builtin:bimodal --stats u,v,w --out \"" + rep + "\""),
              0);
    const auto text = slurp(rep);
    EXPECT_NE(text.find("w.value=0.2"), std::string::npos);
    EXPECT_NE(text.find("seed=5\n"), std::string::npos);
    EXPECT_EQ(run_cli("test --samples \"" + (dir / "bad.txt").string() + "\" --density builtin:bimodal"), 1);
    EXPECT_EQ(run_cli("df --example smooth --points 50 --out \"" + (dir / "curves").string() + "\""), 0);
    EXPECT_TRUE(fs::exists(dir / "curves" / "smooth_df.csv"));
}

TEST(Cli, ParseErrorMentionsLine) {
    auto dir = scratch("cli_line");
    {
        std::ofstream bad(dir / "bad.txt");
        bad << "50\nfifty\n";
    }
    const std::string cmd = std::string("\"") + GOF_CLI_PATH + "\" test --samples \"" + (dir / "bad.txt").string() +
                            "\" --density builtin:bimodal 2> \"" + (dir / "err.txt").string() + "\"";
    EXPECT_NE(std::system(cmd.c_str()), 0);
    EXPECT_NE(slurp(dir / "err.txt").find("line 2"), std::string::npos);
}
