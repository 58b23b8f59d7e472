#pragma once

// Monte Carlo table runs, file-based testing, and curve dumps behind the CLI.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gof/density.hpp"
#include "gof/density_io.hpp"
#include "gof/error.hpp"
#include "gof/examples.hpp"
#include "gof/rearranged.hpp"
#include "gof/stats.hpp"

namespace gof {

inline constexpr std::uint64_t kDefaultMaxWork = 1000000000ULL;

/// Statistics of one trial at one n. Null columns use draws from p, alternative columns draws from q.
struct TrialResult {
    std::size_t n = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double u0 = 0, u1 = 0, v0 = 0, v1 = 0, w0 = 0, w1 = 0;
    double log10_sig_u0 = 0, log10_sig_u1 = 0, log10_sig_v0 = 0, log10_sig_v1 = 0;
};

/// Median and quartiles of one column over trials.
struct Summary {
    double median = 0, q1 = 0, q3 = 0;
};

struct TableRow {
    std::size_t n = 0;
    std::size_t trials = 0;
    Summary u0, u1, v0, v1, w0, w1;
    Summary log10_sig_u1, log10_sig_v1;
};

struct TableResult {
    std::string example;
    std::uint64_t seed = 0;
    std::vector<TableRow> rows;
    std::vector<TrialResult> detail; ///< ordered by n, then trial
};

inline constexpr std::array<std::size_t, 5> kDefaultNList{10, 100, 1000, 10000, 100000};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Linear interpolation between order statistics (type 7).
inline double quantile_of_sorted(const std::vector<double>& v, double prob) {
    if (v.empty()) return 0.0;
    const double h = (static_cast<double>(v.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline Summary summarize(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return {quantile_of_sorted(v, 0.5), quantile_of_sorted(v, 0.25), quantile_of_sorted(v, 0.75)};
}

/// Runs body(i) for i in [0, count) on up to `threads` workers; results must be stored by index.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::uint64_t max_work() {
    const char* env = std::getenv("GOF_MAX_WORK");
    if (!env || !*env) return kDefaultMaxWork;
    try {
        std::size_t used = 0;
        const double v = std::stod(env, &used);
        if (used == std::string(env).size() && v > 0) return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
    }
    throw DomainError(std::string("GOF_MAX_WORK must be a positive number, got '") + env + "'");
}

} // namespace detail

/// Seeds for the null and alternative draws of trial `trial` at sample size n.
/// The trial seed is base + trial; the two streams are split from it by n.
inline std::pair<std::uint64_t, std::uint64_t> trial_seeds(std::uint64_t base, std::size_t trial, std::size_t n) {
    const std::uint64_t s = base + trial;
    const std::uint64_t k = detail::splitmix64(s ^ detail::splitmix64(n));
    return {detail::splitmix64(k), detail::splitmix64(k + 1)};
}

inline TrialResult run_trial(const ExampleSuite& suite, std::size_t n, std::uint64_t base, std::size_t trial) {
    const auto [null_seed, alt_seed] = trial_seeds(base, trial, n);
    TrialResult t;
    t.n = n;
    t.trial = trial;
    t.seed = base + trial;
    const auto& P = cdf(suite.p);
    const auto x0 = sample(suite.p, n, null_seed);
    const auto x1 = sample(suite.q, n, alt_seed);
    const auto u0 = kuiper_u(x0, P), u1 = kuiper_u(x1, P);
    const auto v0 = kuiper_v(x0, suite.p, suite.rearranged), v1 = kuiper_v(x1, suite.p, suite.rearranged);
    t.u0 = u0.statistic;
    t.u1 = u1.statistic;
    t.v0 = v0.statistic;
    t.v1 = v1.statistic;
    t.log10_sig_u0 = u0.log10_pvalue;
    t.log10_sig_u1 = u1.log10_pvalue;
    t.log10_sig_v0 = v0.log10_pvalue;
    t.log10_sig_v1 = v1.log10_pvalue;
    t.w0 = w_statistic(x0, suite.p, suite.rearranged).w;
    t.w1 = w_statistic(x1, suite.p, suite.rearranged).w;
    return t;
}

/// All six statistics for every n and trial, with per-column medians and quartiles.
inline TableResult run_table(std::string_view example, std::span<const std::size_t> n_list, std::uint64_t seed,
                             std::size_t trials, unsigned threads = std::thread::hardware_concurrency()) {
    if (trials == 0) throw DomainError("trials must be at least 1");
    if (n_list.empty()) throw DomainError("need at least one sample size");
    std::uint64_t work = 0;
    for (auto n : n_list) {
        if (n == 0) throw DomainError("sample sizes must be at least 1");
        work += static_cast<std::uint64_t>(n) * trials;
    }
    const auto limit = detail::max_work();
    if (work > limit) {
        std::ostringstream os;
        os << "requested work n*trials = " << work << " exceeds the limit " << limit
           << "; set GOF_MAX_WORK to raise it";
        throw DomainError(os.str());
    }
    const auto& suite = builtin(example);

    TableResult out;
    out.example = std::string(example);
    out.seed = seed;
    out.detail.resize(n_list.size() * trials);
    detail::parallel_for(out.detail.size(), threads, [&](std::size_t i) {
        out.detail[i] = run_trial(suite, n_list[i / trials], seed, i % trials);
    });

    for (std::size_t j = 0; j < n_list.size(); ++j) {
        const auto first = out.detail.begin() + static_cast<std::ptrdiff_t>(j * trials);
        auto column = [&](double TrialResult::*field) {
            std::vector<double> v;
            v.reserve(trials);
            for (auto it = first; it != first + static_cast<std::ptrdiff_t>(trials); ++it) v.push_back((*it).*field);
            return detail::summarize(std::move(v));
        };
        TableRow row;
        row.n = n_list[j];
        row.trials = trials;
        row.u0 = column(&TrialResult::u0);
        row.u1 = column(&TrialResult::u1);
        row.v0 = column(&TrialResult::v0);
        row.v1 = column(&TrialResult::v1);
        row.w0 = column(&TrialResult::w0);
        row.w1 = column(&TrialResult::w1);
        row.log10_sig_u1 = column(&TrialResult::log10_sig_u1);
        row.log10_sig_v1 = column(&TrialResult::log10_sig_v1);
        out.rows.push_back(row);
    }
    return out;
}

/// Scientific notation with three significant digits, e.g. 2.50e+01.
inline std::string sci3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

inline std::string raw(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_table_csv(std::ostream& out, const TableResult& t) {
    const char* names[] = {"u0", "u1", "v0", "v1", "w0", "w1"};
    out << "example,seed,n,trials";
    for (const char* c : names) out << ',' << c << ',' << c << "_raw," << c << "_q1," << c << "_q3";
    out << ",log10_sig_u1,log10_sig_u1_raw,log10_sig_v1,log10_sig_v1_raw\n";
    for (const auto& r : t.rows) {
        out << t.example << ',' << t.seed << ',' << r.n << ',' << r.trials;
        for (const Summary* s : {&r.u0, &r.u1, &r.v0, &r.v1, &r.w0, &r.w1})
            out << ',' << sci3(s->median) << ',' << raw(s->median) << ',' << raw(s->q1) << ',' << raw(s->q3);
        for (const Summary* s : {&r.log10_sig_u1, &r.log10_sig_v1})
            out << ',' << static_cast<long long>(std::lround(s->median)) << ',' << raw(s->median);
        out << '\n';
    }
}

inline void write_trials_csv(std::ostream& out, const TableResult& t) {
    out << "example,n,trial,seed,u0,u1,v0,v1,w0,w1,log10_sig_u0,log10_sig_u1,log10_sig_v0,log10_sig_v1\n";
    for (const auto& r : t.detail)
        out << t.example << ',' << r.n << ',' << r.trial << ',' << r.seed << ',' << raw(r.u0) << ',' << raw(r.u1)
            << ',' << raw(r.v0) << ',' << raw(r.v1) << ',' << raw(r.w0) << ',' << raw(r.w1) << ','
            << raw(r.log10_sig_u0) << ',' << raw(r.log10_sig_u1) << ',' << raw(r.log10_sig_v0) << ','
            << raw(r.log10_sig_v1) << '\n';
}

/// Paper-style text table: value then rounded log10 significance in parentheses.
inline void print_table(std::ostream& out, const TableResult& t) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-8s %-16s %-16s %-10s %-16s %-16s %s\n", "n", "U0", "U1", "V0", "V1", "W0",
                  "W1");
    out << t.example << " (medians over " << (t.rows.empty() ? 0 : t.rows.front().trials) << " trials)\n" << buf;
    for (const auto& r : t.rows) {
        auto with_sig = [](double v, double sig) {
            return sci3(v) + " (" + std::to_string(std::lround(sig)) + ")";
        };
        std::snprintf(buf, sizeof buf, "%-8zu %-16s %-16s %-10s %-16s %-16s %-10s\n", r.n, sci3(r.u0.median).c_str(),
                      with_sig(r.u1.median, r.log10_sig_u1.median).c_str(), sci3(r.v0.median).c_str(),
                      with_sig(r.v1.median, r.log10_sig_v1.median).c_str(), sci3(r.w0.median).c_str(),
                      sci3(r.w1.median).c_str());
        out << buf;
    }
}

/// A density and its distribution function of p(X), from a builtin suite or a spec file.
struct ResolvedDensity {
    std::string name;
    std::shared_ptr<const Density> density;
    std::shared_ptr<const RearrangedDF> rearranged;
};

/// `builtin:NAME` (the suite's null density), `builtin:NAME:alt` (its alternative), or a spec file path.
inline ResolvedDensity resolve_density(const std::string& spec) {
    static constexpr std::string_view prefix = "builtin:";
    if (spec.rfind(prefix, 0) == 0) {
        std::string name = spec.substr(prefix.size());
        bool alt = false;
        if (auto colon = name.find(':'); colon != std::string::npos) {
            if (name.substr(colon + 1) != "alt") throw DomainError("unknown density variant in '" + spec + "'");
            alt = true;
            name.resize(colon);
        }
        const auto& suite = builtin(name);
        if (!alt) {
            // suites are never destroyed; alias without ownership
            return {name, std::shared_ptr<const Density>(&suite.p, [](const Density*) {}),
                    std::shared_ptr<const RearrangedDF>(&suite.rearranged, [](const RearrangedDF*) {})};
        }
        auto q = std::make_shared<const Density>(suite.q);
        return {name + ":alt", q, std::make_shared<const RearrangedDF>(build_rearranged(*q))};
    }
    std::ifstream in(spec);
    if (!in) throw DomainError("cannot open density spec '" + spec + "'");
    auto d = std::make_shared<const Density>(parse_density_spec(in, spec));
    return {spec, d, std::make_shared<const RearrangedDF>(build_rearranged(*d))};
}

enum class Stat { u, v, w, wtilde };

inline std::vector<Stat> parse_stats(const std::string& list) {
    std::vector<Stat> out;
    std::istringstream in(list);
    for (std::string tok; std::getline(in, tok, ',');) {
        if (tok == "u") out.push_back(Stat::u);
        else if (tok == "v") out.push_back(Stat::v);
        else if (tok == "w") out.push_back(Stat::w);
        else if (tok == "wtilde") out.push_back(Stat::wtilde);
        else throw DomainError("unknown statistic '" + tok + "' (expected u, v, w, wtilde)");
    }
    if (out.empty()) throw DomainError("no statistics requested");
    return out;
}

/// 100(1 - w) rounded down, with enough decimals to show the first digit that differs from 9.
inline std::string confidence_percent(double w) {
    const double pct = 100.0 * (1.0 - w);
    int decimals = 0;
    if (w > 0.0) decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(w) - 1e-12)) - 2);
    else decimals = 6;
    decimals = std::min(decimals, 15);
    const double scale = std::pow(10.0, decimals);
    const double shown = std::floor(pct * scale + 1e-9) / scale;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, shown);
    return buf;
}

struct TestOutcome {
    TestReport report;
    std::vector<std::string> verdicts;
};

/// Computes the requested statistics of `samples` against `density` and phrases the verdicts.
inline TestOutcome run_test(const SampleSet& samples, const ResolvedDensity& density, std::span<const Stat> stats) {
    TestOutcome out;
    auto& rep = out.report;
    rep.seed = samples.seed;
    rep.source = samples.source;
    rep.generator = samples.generator;
    rep.density = density.name;
    const auto& d = *density.density;
    const auto& r = *density.rearranged;

    std::size_t outside = 0;
    for (double x : samples.draws)
        if (!d.support().contains(x)) ++outside;
    if (outside) {
        std::ostringstream os;
        os << outside << " of " << samples.n() << " draws lie outside the support [" << d.support().lo << ", "
           << d.support().hi << "]; they are treated as p(X) = 0";
        rep.warnings.push_back(os.str());
    }

    auto kuiper_line = [&](const char* tag, const KuiperResult& k) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s = %.6g, log10 significance %.2f: %s at the 1%% level", tag, k.statistic,
                      k.log10_pvalue, k.log10_pvalue < -2.0 ? "reject" : "no rejection");
        out.verdicts.push_back(buf);
    };
    for (Stat s : stats) {
        switch (s) {
        case Stat::u:
            rep.u = kuiper_u(samples, cdf(d));
            kuiper_line("U", *rep.u);
            break;
        case Stat::v:
            rep.v = kuiper_v(samples, d, r);
            kuiper_line("V", *rep.v);
            if (!r.atoms().empty())
                out.verdicts.push_back("V: p is constant on a set of positive mass; its significance level is conservative");
            break;
        case Stat::w: {
            rep.w = w_statistic(samples, d, r);
            std::ostringstream os;
            os.precision(6);
            os << "W = " << rep.w->w << ": ";
            if (rep.w->w <= 1.0)
                os << "the draws are not from this density with ≥ " << confidence_percent(rep.w->w)
                   << "% confidence";
            else
                os << "no rejection (W > 1)";
            out.verdicts.push_back(os.str());
            break;
        }
        case Stat::wtilde: {
            rep.w_tilde = w_tilde(samples, d, r);
            std::ostringstream os;
            os.precision(6);
            os << "W~ = " << *rep.w_tilde << " (average of P(p(X_k)); 1/2 expected under the null)";
            out.verdicts.push_back(os.str());
            break;
        }
        }
    }
    return out;
}

namespace detail {

inline void write_curve(const std::filesystem::path& path, const std::vector<std::pair<double, double>>& rows) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write '" + path.string() + "'");
    out << "x,value\n";
    for (const auto& [x, v] : rows) out << raw(x) << ',' << raw(v) << '\n';
    if (!out) throw DomainError("failed writing '" + path.string() + "'");
}

} // namespace detail

/// Writes NAME_pdf.csv, NAME_cdf.csv and NAME_df.csv into `dir`. Returns the paths written.
inline std::vector<std::filesystem::path> emit_curves(std::string_view example, std::size_t points,
                                                      const std::filesystem::path& dir) {
    if (points < 2) throw DomainError("points must be at least 2");
    const auto& s = builtin(example);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!std::filesystem::is_directory(dir)) throw DomainError("output directory '" + dir.string() + "' is unusable");

    const auto iv = s.p.support();
    auto grid = [&](double lo, double hi, std::size_t i) {
        return i + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    };
    std::vector<std::pair<double, double>> pdf, cdf_rows, df;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = grid(iv.lo, iv.hi, i);
        pdf.emplace_back(x, s.p(x));
        cdf_rows.emplace_back(x, cdf(s.p)(x));
    }
    const auto& r = s.rearranged;
    const auto atoms = r.atoms();
    std::size_t a = 0;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = grid(0.0, r.max_p(), i);
        for (; a < atoms.size() && atoms[a].level <= x; ++a) {
            df.emplace_back(atoms[a].level, r.left_limit(atoms[a].level));
            df.emplace_back(atoms[a].level, r(atoms[a].level));
        }
        if (!df.empty() && df.back().first == x) continue;
        df.emplace_back(x, r(x));
    }
    const std::string name(example);
    std::vector<std::filesystem::path> paths{dir / (name + "_pdf.csv"), dir / (name + "_cdf.csv"),
                                             dir / (name + "_df.csv")};
    detail::write_curve(paths[0], pdf);
    detail::write_curve(paths[1], cdf_rows);
    detail::write_curve(paths[2], df);
    return paths;
}

} // namespace gof
