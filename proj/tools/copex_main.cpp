// copex command line: fit / price / compare / chain-dump / simulate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "copex/copex.hpp"

namespace {

using namespace copex;

struct WindowFlag {
    std::string text;
    Date first, last;

    bool parse() {
        const auto colon = text.find(':');
        if (colon == std::string::npos) return false;
        const auto a = Date::parse(text.substr(0, colon));
        const auto b = Date::parse(text.substr(colon + 1));
        if (!a || !b || *b < *a) return false;
        first = *a;
        last = *b;
        return true;
    }
};

std::vector<std::string> split_families(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto comma = csv.find(',', pos);
        const auto end = comma == std::string::npos ? csv.size() : comma;
        if (end > pos) out.push_back(csv.substr(pos, end - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// Shared copula parameter flags for chain-dump / simulate.
struct SpecFlags {
    std::string family;
    double theta = 0.0;
    double rho = 0.0;
    double alpha = 0.0, beta = 0.0, gamma = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family,
                        "copula family: independence|comonotone|countermonotone|frechet|gumbel|clayton|frank|gaussian")
            ->required();
        cmd->add_option("--theta", theta, "gumbel/clayton/frank parameter");
        cmd->add_option("--rho", rho, "gaussian correlation");
        cmd->add_option("--alpha", alpha, "frechet comonotone weight");
        cmd->add_option("--beta", beta, "frechet independence weight");
        cmd->add_option("--gamma", gamma, "frechet countermonotone weight");
    }

    CopulaSpec build() const {
        const auto fam = family_from_string(family);
        if (!fam) raise(Errc::ParamOutOfDomain, "unknown family '" + family + "'");
        CopulaSpec spec;
        switch (*fam) {
            case CopulaFamily::Independence: spec = CopulaSpec::independence(); break;
            case CopulaFamily::Comonotone: spec = CopulaSpec::comonotone(); break;
            case CopulaFamily::Countermonotone: spec = CopulaSpec::countermonotone(); break;
            case CopulaFamily::Frechet: spec = CopulaSpec::frechet(alpha, beta, gamma); break;
            case CopulaFamily::Gumbel: spec = CopulaSpec::gumbel(theta); break;
            case CopulaFamily::Clayton: spec = CopulaSpec::clayton(theta); break;
            case CopulaFamily::Frank: spec = CopulaSpec::frank(theta); break;
            case CopulaFamily::Gaussian: spec = CopulaSpec::gaussian(rho); break;
        }
        validate(spec);
        return spec;
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::ParseError, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) raise(Errc::ParseError, "short write to '" + path + "'");
}

std::string meta_path_for(const std::string& csv_path) {
    if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
        return csv_path.substr(0, csv_path.size() - 4) + ".meta.json";
    return csv_path + ".meta.json";
}

DriftMode parse_drift(const std::string& text) {
    if (text == "martingale") return DriftMode::Martingale;
    if (text == "paper") return DriftMode::PaperLiteral;
    raise(Errc::ParamOutOfDomain, "--drift must be martingale or paper, got '" + text + "'");
}

PriceMethod parse_method(const std::string& text) {
    if (text == "mcmc") return PriceMethod::Mcmc;
    if (text == "quadrature") return PriceMethod::Quadrature;
    raise(Errc::ParamOutOfDomain, "--method must be mcmc or quadrature, got '" + text + "'");
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::ParseError:
        case Errc::EmptySeries:
        case Errc::InsufficientData:
        case Errc::DegenerateSeries: return 2;
        default: return 3;
    }
}

struct PricingFlags {
    WindowFlag out_window;
    double tau = 0.25;
    double r = 0.0;
    std::string drift = "martingale";
    std::string method = "mcmc";
    std::uint64_t seed = 1;
    std::uint64_t burn_in = 5000;
    std::uint64_t samples = 200000;
    std::uint64_t thin = 1;
    int quad_panels = 8;
    int quad_doublings = 12;
    double quad_tol = 1e-6;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out-of-sample", out_window.text, "pricing window, ISO dates A:B")->required();
        cmd->add_option("--tau", tau, "time to expiry in years")->required();
        cmd->add_option("--r", r, "risk-free rate per year")->required();
        cmd->add_option("--drift", drift, "martingale|paper (default martingale)");
        cmd->add_option("--method", method, "mcmc|quadrature (default mcmc)");
        cmd->add_option("--seed", seed, "base seed; date i prices with derive_stream(seed, i)");
        cmd->add_option("--burn-in", burn_in, "discarded Gibbs pairs (default 5000)");
        cmd->add_option("--samples", samples, "kept Gibbs pairs (default 200000)");
        cmd->add_option("--thin", thin, "keep every thin-th pair (default 1)");
        cmd->add_option("--quad-panels", quad_panels, "initial quadrature panel count");
        cmd->add_option("--quad-doublings", quad_doublings, "maximum panel doublings");
        cmd->add_option("--quad-tol", quad_tol, "quadrature tolerance as a fraction of S1");
    }

    PricingConfig build() const {
        PricingConfig pc;
        WindowFlag w = out_window;
        if (!w.parse()) raise(Errc::ParamOutOfDomain, "--out-of-sample must be YYYY-MM-DD:YYYY-MM-DD");
        pc.out_start = w.first;
        pc.out_end = w.last;
        pc.tau = tau;
        pc.r = r;
        pc.drift = parse_drift(drift);
        pc.method = parse_method(method);
        pc.chain = ChainConfig{burn_in, samples, thin, seed};
        pc.quadrature = QuadratureSettings{quad_panels, quad_doublings, quad_tol};
        return pc;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"copula exchange-option pricing engine"};
    app.require_subcommand(1);

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "fit marginals and copulas on an in-sample window");
    std::string fit_input, fit_out, fit_families = "gumbel,clayton,frank,gaussian,gbm";
    WindowFlag fit_window;
    int fit_ppy = 252;
    fit_cmd->add_option("--input", fit_input, "price CSV (date,s1,s2)")->required();
    fit_cmd->add_option("--in-sample", fit_window.text, "fitting window, ISO dates A:B")->required();
    fit_cmd->add_option("--families", fit_families,
                        "comma list of gumbel|clayton|frank|gaussian|frechet|gbm");
    fit_cmd->add_option("--periods-per-year", fit_ppy, "annualization convention (default 252)");
    fit_cmd->add_option("--out", fit_out, "fit artifact JSON path")->required();

    // ---- price ----
    auto* price_cmd = app.add_subcommand("price", "price an out-of-sample window from a fit artifact");
    std::string price_fit, price_input, price_out;
    PricingFlags price_flags;
    price_cmd->add_option("--fit", price_fit, "fit artifact JSON from `fit`")->required();
    price_cmd->add_option("--input", price_input, "price CSV (date,s1,s2)")->required();
    price_flags.attach(price_cmd);
    price_cmd->add_option("--out", price_out, "output CSV path")->required();

    // ---- compare ----
    auto* compare_cmd = app.add_subcommand("compare", "fit and price in one pass");
    std::string cmp_input, cmp_out, cmp_fit_out, cmp_families = "gumbel,clayton,frank,gaussian,gbm";
    WindowFlag cmp_window;
    int cmp_ppy = 252;
    PricingFlags cmp_flags;
    compare_cmd->add_option("--input", cmp_input, "price CSV (date,s1,s2)")->required();
    compare_cmd->add_option("--in-sample", cmp_window.text, "fitting window, ISO dates A:B")->required();
    compare_cmd->add_option("--families", cmp_families,
                            "comma list of gumbel|clayton|frank|gaussian|gbm");
    compare_cmd->add_option("--periods-per-year", cmp_ppy, "annualization convention (default 252)");
    cmp_flags.attach(compare_cmd);
    compare_cmd->add_option("--out", cmp_out, "output CSV path")->required();
    compare_cmd->add_option("--fit-out", cmp_fit_out, "also write the fit artifact here");

    // ---- chain-dump ----
    auto* chain_cmd = app.add_subcommand("chain-dump", "dump a Gibbs chain as CSV (k,u1,u2)");
    SpecFlags chain_spec;
    chain_spec.attach(chain_cmd);
    std::string chain_out;
    std::uint64_t ch_seed = 1, ch_burn = 5000, ch_kept = 10000, ch_thin = 1;
    chain_cmd->add_option("--seed", ch_seed, "chain seed");
    chain_cmd->add_option("--burn-in", ch_burn, "discarded pairs (default 5000)");
    chain_cmd->add_option("--samples", ch_kept, "kept pairs (default 10000)");
    chain_cmd->add_option("--thin", ch_thin, "keep every thin-th pair");
    chain_cmd->add_option("--out", chain_out, "output CSV path")->required();

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic price CSV from a copula + marginals");
    SpecFlags sim_spec;
    sim_spec.attach(sim_cmd);
    std::string sim_out, sim_start = "2018-01-01";
    std::uint64_t sim_n = 500, sim_seed = 1;
    double sim_mu1 = 0.0, sim_sigma1 = 0.2, sim_mu2 = 0.0, sim_sigma2 = 0.2;
    double sim_s1 = 100.0, sim_s2 = 100.0;
    int sim_ppy = 252;
    sim_cmd->add_option("--n", sim_n, "number of price rows (default 500)");
    sim_cmd->add_option("--seed", sim_seed, "simulation seed");
    sim_cmd->add_option("--mu1", sim_mu1, "annualized drift, asset 1");
    sim_cmd->add_option("--sigma1", sim_sigma1, "annualized volatility, asset 1")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--mu2", sim_mu2, "annualized drift, asset 2");
    sim_cmd->add_option("--sigma2", sim_sigma2, "annualized volatility, asset 2")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--s1-0", sim_s1, "initial price, asset 1")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--s2-0", sim_s2, "initial price, asset 2")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--periods-per-year", sim_ppy, "annualization convention (default 252)");
    sim_cmd->add_option("--start-date", sim_start, "first row date (default 2018-01-01)");
    sim_cmd->add_option("--out", sim_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // collapse CLI11's per-error exit codes onto the documented usage code
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*fit_cmd) {
            if (!fit_window.parse()) raise(Errc::ParamOutOfDomain, "--in-sample must be YYYY-MM-DD:YYYY-MM-DD");
            FitConfig fc;
            fc.in_start = fit_window.first;
            fc.in_end = fit_window.last;
            fc.families = split_families(fit_families);
            if (fc.families.empty()) {
                std::fprintf(stderr, "error: --families must name at least one model\n");
                return 1;
            }
            fc.periods_per_year = fit_ppy;
            const auto series = ingest_csv_file(fit_input);
            const auto artifact = fit_models(series, fc);
            write_file(fit_out, artifact_to_json(artifact).dump(2) + "\n");
            std::printf("fit: %zu returns, %zu models -> %s\n", artifact.n_returns,
                        artifact.copulas.size(), fit_out.c_str());
        } else if (*price_cmd) {
            std::ifstream in(price_fit);
            if (!in) raise(Errc::ParseError, "cannot open '" + price_fit + "'");
            const auto artifact = artifact_from_json(ordered_json::parse(in));
            const auto series = ingest_csv_file(price_input);
            const auto pc = price_flags.build();
            const auto table = price_models(series, artifact, pc);
            write_file(price_out, to_csv(table));
            write_file(meta_path_for(price_out), meta_json(artifact, pc, table).dump(2) + "\n");
            std::printf("price: %zu dates x %zu models -> %s\n", table.rows.size(), table.columns.size(),
                        price_out.c_str());
        } else if (*compare_cmd) {
            if (!cmp_window.parse()) raise(Errc::ParamOutOfDomain, "--in-sample must be YYYY-MM-DD:YYYY-MM-DD");
            for (const std::string& f : split_families(cmp_families))
                if (f == "frechet")
                    raise(Errc::ParamOutOfDomain,
                          "compare prices the fixed columns gumbel,clayton,frank,gaussian,gbm; "
                          "frechet fits are available through `fit`");
            RunConfig rc;
            rc.fit.in_start = cmp_window.first;
            rc.fit.in_end = cmp_window.last;
            rc.fit.families = split_families(cmp_families);
            if (rc.fit.families.empty()) {
                std::fprintf(stderr, "error: --families must name at least one model\n");
                return 1;
            }
            rc.fit.periods_per_year = cmp_ppy;
            rc.pricing = cmp_flags.build();
            const auto series = ingest_csv_file(cmp_input);
            FitArtifact artifact;
            const auto table = run_compare(series, rc, &artifact);
            write_file(cmp_out, to_csv(table));
            write_file(meta_path_for(cmp_out), meta_json(artifact, rc.pricing, table).dump(2) + "\n");
            if (!cmp_fit_out.empty()) write_file(cmp_fit_out, artifact_to_json(artifact).dump(2) + "\n");
            std::printf("compare: %zu dates x %zu models -> %s\n", table.rows.size(), table.columns.size(),
                        cmp_out.c_str());
        } else if (*chain_cmd) {
            const auto spec = chain_spec.build();
            const auto chain = run_chain(spec, ChainConfig{ch_burn, ch_kept, ch_thin, ch_seed});
            std::string csv = "k,u1,u2\n";
            char buf[80];
            for (std::size_t k = 0; k < chain.pairs.size(); ++k) {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", k + 1, chain.pairs[k].u,
                              chain.pairs[k].v);
                csv += buf;
            }
            write_file(chain_out, csv);
            std::printf("chain-dump: %zu pairs, sample tau %.4f%s -> %s\n", chain.pairs.size(),
                        chain.sample_tau, chain.degenerate_map ? " (degenerate map)" : "", chain_out.c_str());
        } else if (*sim_cmd) {
            const auto spec = sim_spec.build();
            const auto start = Date::parse(sim_start);
            if (!start) raise(Errc::ParamOutOfDomain, "--start-date must be YYYY-MM-DD");
            const auto pairs = sample_iid(spec, sim_n, sim_seed);
            const double m1 = sim_mu1 / sim_ppy, s1 = sim_sigma1 / std::sqrt((double)sim_ppy);
            const double m2 = sim_mu2 / sim_ppy, s2 = sim_sigma2 / std::sqrt((double)sim_ppy);
            std::string csv = "date,s1,s2\n";
            double p1 = sim_s1, p2 = sim_s2;
            Date d = *start;
            static const int mdays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
            char buf[80];
            for (std::uint64_t k = 0; k < sim_n; ++k) {
                p1 *= std::exp(m1 + s1 * std_normal_quantile(pairs[k].u));
                p2 *= std::exp(m2 + s2 * std_normal_quantile(pairs[k].v));
                std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", d.to_string().c_str(), p1, p2);
                csv += buf;
                if (++d.day > mdays[d.month - 1]) {
                    d.day = 1;
                    if (++d.month > 12) {
                        d.month = 1;
                        ++d.year;
                    }
                }
            }
            write_file(sim_out, csv);
            std::printf("simulate: %llu rows -> %s\n", (unsigned long long)sim_n, sim_out.c_str());
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
