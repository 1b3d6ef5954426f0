// Fit/price orchestration behind the CLI: in-sample model fitting, a
// Table-2-style out-of-sample comparison grid, and the serialized artifacts
// (fit JSON, price CSV, run metadata).

#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "copex/copula.hpp"
#include "copex/errors.hpp"
#include "copex/estimation.hpp"
#include "copex/gibbs.hpp"
#include "copex/normal.hpp"
#include "copex/pricing.hpp"
#include "copex/rng.hpp"
#include "copex/timeseries.hpp"

namespace copex {

using ordered_json = nlohmann::ordered_json;

/// Fixed output column order (filtered to the requested families).
inline const std::vector<std::string>& fixed_column_order() {
    static const std::vector<std::string> order = {"gumbel", "clayton", "frank", "gaussian", "gbm"};
    return order;
}

inline bool is_fittable_family(const std::string& name) {
    return name == "gumbel" || name == "clayton" || name == "frank" || name == "gaussian" || name == "frechet";
}

struct FitConfig {
    Date in_start, in_end;
    std::vector<std::string> families; // fittable families and/or "gbm"
    int periods_per_year = 252;
};

struct PricingConfig {
    Date out_start, out_end;
    double tau = 0.25;
    double r = 0.0;
    DriftMode drift = DriftMode::Martingale;
    PriceMethod method = PriceMethod::Mcmc; // Mcmc or Quadrature
    ChainConfig chain;
    QuadratureSettings quadrature;
};

struct RunConfig {
    FitConfig fit;
    PricingConfig pricing;
};

/// Everything the pricing stage needs from the in-sample window.
struct FitArtifact {
    Date in_start, in_end;
    int periods_per_year = 252;
    std::size_t n_returns = 0;
    int unsorted_warnings = 0;
    MarginalFit marginal1, marginal2;
    std::vector<std::string> families;               // the request, incl. "gbm"
    std::map<std::string, FitResult> copulas;        // fitted parameters by family name
};

struct ComparisonCell {
    bool ok = false;
    double value = 0.0;
    std::string error; // reason when !ok
};

struct ComparisonTable {
    std::vector<std::string> columns; // family names after the date column
    struct Row {
        Date date;
        std::vector<ComparisonCell> cells;
    };
    std::vector<Row> rows;
};

// --- fitting ----------------------------------------------------------------

inline FitArtifact fit_models(const PriceSeries& series, const FitConfig& config) {
    for (const std::string& f : config.families)
        if (!is_fittable_family(f) && f != "gbm")
            raise(Errc::ParamOutOfDomain, "fit_models: unknown family '" + f + "'");
    if (config.families.empty()) raise(Errc::ParamOutOfDomain, "fit_models: families must be nonempty");

    const PriceSeries window = slice(series, config.in_start, config.in_end);
    if (window.rows.empty()) raise(Errc::EmptySeries, "fit_models: in-sample window contains no rows");
    const ReturnPanel panel = compute_log_returns(window);

    std::vector<double> x1, x2;
    x1.reserve(panel.rows.size());
    x2.reserve(panel.rows.size());
    for (const ReturnRow& row : panel.rows) {
        x1.push_back(row.x1);
        x2.push_back(row.x2);
    }

    FitArtifact artifact;
    artifact.in_start = config.in_start;
    artifact.in_end = config.in_end;
    artifact.periods_per_year = config.periods_per_year;
    artifact.n_returns = panel.rows.size();
    artifact.unsorted_warnings = series.unsorted_warnings;
    artifact.families = config.families;
    artifact.marginal1 = fit_marginal(x1, config.periods_per_year);
    artifact.marginal2 = fit_marginal(x2, config.periods_per_year);

    std::vector<std::string> to_fit;
    for (const std::string& f : config.families)
        if (is_fittable_family(f)) to_fit.push_back(f);
    // The GBM column prices with the fitted Gaussian correlation.
    const bool wants_gbm =
        std::find(config.families.begin(), config.families.end(), "gbm") != config.families.end();
    if (wants_gbm && std::find(to_fit.begin(), to_fit.end(), "gaussian") == to_fit.end())
        to_fit.push_back("gaussian");

    if (!to_fit.empty()) {
        const PseudoObservations obs =
            pseudo_observations(panel, artifact.marginal1.params, artifact.marginal2.params);
        for (const std::string& name : to_fit) {
            if (name == "frechet") {
                artifact.copulas[name] = fit_frechet(obs);
            } else {
                artifact.copulas[name] = fit_copula(*family_from_string(name), obs);
            }
        }
    }
    return artifact;
}

// --- pricing ----------------------------------------------------------------

inline std::vector<std::string> pricing_columns(const FitArtifact& artifact) {
    std::vector<std::string> cols;
    for (const std::string& name : fixed_column_order())
        if (std::find(artifact.families.begin(), artifact.families.end(), name) != artifact.families.end())
            cols.push_back(name);
    return cols;
}

/// Prices every out-of-sample date under every requested model. Per-date
/// failures become in-row markers instead of aborting the batch. The chain
/// seed for date index i is derive_stream(chain.seed, i), so rows are
/// reproducible independently of evaluation order.
inline ComparisonTable price_models(const PriceSeries& series, const FitArtifact& artifact,
                                    const PricingConfig& config) {
    if (!(config.tau > 0.0)) raise(Errc::ParamOutOfDomain, "price_models: tau must be > 0");
    const PriceSeries window = slice(series, config.out_start, config.out_end);
    if (window.rows.empty()) raise(Errc::EmptySeries, "price_models: out-of-sample window contains no rows");

    ComparisonTable table;
    table.columns = pricing_columns(artifact);
    if (table.columns.empty())
        raise(Errc::ParamOutOfDomain, "price_models: fit artifact holds no priceable model column");

    const double sigma1 = artifact.marginal1.params.sigma;
    const double sigma2 = artifact.marginal2.params.sigma;
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
        raise(Errc::DegenerateSeries, "price_models: fitted sigma is degenerate; cannot price");
    const NormalMarginal m1 = risk_neutral_marginal(config.r, sigma1, config.tau, config.drift);
    const NormalMarginal m2 = risk_neutral_marginal(config.r, sigma2, config.tau, config.drift);

    const auto copula_of = [&](const std::string& name) -> const CopulaSpec& {
        const auto it = artifact.copulas.find(name);
        if (it == artifact.copulas.end())
            raise(Errc::ParamOutOfDomain, "price_models: artifact lacks a fit for '" + name + "'");
        return it->second.spec;
    };

    for (std::size_t i = 0; i < window.rows.size(); ++i) {
        const PriceRow& row = window.rows[i];
        const MarketState state{row.s1, row.s2, config.r, config.tau};
        ChainConfig chain = config.chain;
        chain.seed = derive_stream(config.chain.seed, i);

        ComparisonTable::Row out_row;
        out_row.date = row.date;
        for (const std::string& name : table.columns) {
            ComparisonCell cell;
            try {
                PriceResult res;
                if (name == "gbm") {
                    res = margrabe_price(state, sigma1, sigma2, copula_of("gaussian").rho);
                } else if (config.method == PriceMethod::Quadrature) {
                    res = quadrature_price(state, copula_of(name), m1, m2, config.quadrature);
                } else {
                    res = mcmc_price(state, copula_of(name), m1, m2, chain);
                }
                cell.ok = true;
                cell.value = res.value;
            } catch (const Error& err) {
                cell.ok = false;
                cell.error = err.what();
            }
            out_row.cells.push_back(cell);
        }
        table.rows.push_back(std::move(out_row));
    }
    return table;
}

inline ComparisonTable run_compare(const PriceSeries& series, const RunConfig& config, FitArtifact* fit_out = nullptr) {
    if (!(config.fit.in_end < config.pricing.out_start))
        raise(Errc::ParamOutOfDomain, "run_compare: the in-sample window must precede the out-of-sample window");
    const FitArtifact artifact = fit_models(series, config.fit);
    if (fit_out) *fit_out = artifact;
    return price_models(series, artifact, config.pricing);
}

// --- serialization ------------------------------------------------------------

/// Table-2-style CSV: fixed header order, prices with 4 decimals, failures
/// as NA.
inline std::string to_csv(const ComparisonTable& table) {
    std::string out = "date";
    for (const std::string& col : table.columns) {
        out += ',';
        out += col;
    }
    out += '\n';
    char buf[32];
    for (const auto& row : table.rows) {
        out += row.date.to_string();
        for (const ComparisonCell& cell : row.cells) {
            out += ',';
            if (cell.ok) {
                std::snprintf(buf, sizeof(buf), "%.4f", cell.value);
                out += buf;
            } else {
                out += "NA";
            }
        }
        out += '\n';
    }
    return out;
}

inline ordered_json spec_to_json(const CopulaSpec& spec) {
    ordered_json j;
    j["family"] = to_string(spec.family);
    switch (spec.family) {
        case CopulaFamily::Gumbel:
        case CopulaFamily::Clayton:
        case CopulaFamily::Frank: j["theta"] = spec.theta; break;
        case CopulaFamily::Gaussian: j["rho"] = spec.rho; break;
        case CopulaFamily::Frechet:
            j["alpha"] = spec.weights.alpha;
            j["beta"] = spec.weights.beta;
            j["gamma"] = spec.weights.gamma;
            break;
        default: break;
    }
    return j;
}

inline CopulaSpec spec_from_json(const ordered_json& j) {
    const auto family = family_from_string(j.at("family").get<std::string>());
    if (!family) raise(Errc::ParseError, "fit artifact: unknown family '" + j.at("family").get<std::string>() + "'");
    CopulaSpec spec;
    switch (*family) {
        case CopulaFamily::Independence: spec = CopulaSpec::independence(); break;
        case CopulaFamily::Comonotone: spec = CopulaSpec::comonotone(); break;
        case CopulaFamily::Countermonotone: spec = CopulaSpec::countermonotone(); break;
        case CopulaFamily::Gumbel: spec = CopulaSpec::gumbel(j.at("theta").get<double>()); break;
        case CopulaFamily::Clayton: spec = CopulaSpec::clayton(j.at("theta").get<double>()); break;
        case CopulaFamily::Frank: spec = CopulaSpec::frank(j.at("theta").get<double>()); break;
        case CopulaFamily::Gaussian: spec = CopulaSpec::gaussian(j.at("rho").get<double>()); break;
        case CopulaFamily::Frechet:
            spec = CopulaSpec::frechet(j.at("alpha").get<double>(), j.at("beta").get<double>(),
                                       j.at("gamma").get<double>());
            break;
    }
    validate(spec);
    return spec;
}

inline ordered_json artifact_to_json(const FitArtifact& artifact) {
    ordered_json j;
    j["schema"] = "copex-fit/1";
    j["in_sample"] = {{"start", artifact.in_start.to_string()}, {"end", artifact.in_end.to_string()}};
    j["periods_per_year"] = artifact.periods_per_year;
    j["n_returns"] = artifact.n_returns;
    j["unsorted_warnings"] = artifact.unsorted_warnings;
    const auto marginal_json = [](const MarginalFit& m) {
        ordered_json mj;
        mj["mu"] = m.params.mu;
        mj["sigma"] = m.params.sigma;
        mj["sample_mean"] = m.sample_mean;
        mj["sample_sd"] = m.sample_sd;
        mj["n"] = m.n;
        mj["degenerate"] = m.degenerate;
        return mj;
    };
    j["marginals"]["s1"] = marginal_json(artifact.marginal1);
    j["marginals"]["s2"] = marginal_json(artifact.marginal2);
    j["families"] = artifact.families;
    ordered_json copulas;
    for (const auto& [name, fit] : artifact.copulas) {
        ordered_json cj = spec_to_json(fit.spec);
        if (fit.loglik) cj["loglik"] = *fit.loglik;
        if (fit.distance) cj["distance"] = *fit.distance;
        cj["iterations"] = fit.iterations;
        cj["at_boundary"] = fit.at_boundary;
        copulas[name] = cj;
    }
    j["copulas"] = copulas;
    return j;
}

inline FitArtifact artifact_from_json(const ordered_json& j) {
    if (j.value("schema", "") != "copex-fit/1") raise(Errc::ParseError, "fit artifact: unknown schema");
    FitArtifact artifact;
    const auto parse_date = [](const std::string& text) {
        const auto d = Date::parse(text);
        if (!d) raise(Errc::ParseError, "fit artifact: bad date '" + text + "'");
        return *d;
    };
    artifact.in_start = parse_date(j.at("in_sample").at("start").get<std::string>());
    artifact.in_end = parse_date(j.at("in_sample").at("end").get<std::string>());
    artifact.periods_per_year = j.at("periods_per_year").get<int>();
    artifact.n_returns = j.at("n_returns").get<std::size_t>();
    artifact.unsorted_warnings = j.value("unsorted_warnings", 0);
    const auto marginal_from = [](const ordered_json& mj) {
        MarginalFit m;
        m.params.mu = mj.at("mu").get<double>();
        m.params.sigma = mj.at("sigma").get<double>();
        m.sample_mean = mj.at("sample_mean").get<double>();
        m.sample_sd = mj.at("sample_sd").get<double>();
        m.n = mj.at("n").get<std::size_t>();
        m.degenerate = mj.at("degenerate").get<bool>();
        return m;
    };
    artifact.marginal1 = marginal_from(j.at("marginals").at("s1"));
    artifact.marginal1.params.periods_per_year = artifact.periods_per_year;
    artifact.marginal2 = marginal_from(j.at("marginals").at("s2"));
    artifact.marginal2.params.periods_per_year = artifact.periods_per_year;
    artifact.families = j.at("families").get<std::vector<std::string>>();
    for (const auto& [name, cj] : j.at("copulas").items()) {
        FitResult fit;
        fit.spec = spec_from_json(cj);
        if (cj.contains("loglik")) fit.loglik = cj.at("loglik").get<double>();
        if (cj.contains("distance")) fit.distance = cj.at("distance").get<double>();
        fit.iterations = cj.value("iterations", 0);
        fit.at_boundary = cj.value("at_boundary", false);
        artifact.copulas[name] = fit;
    }
    return artifact;
}

/// Full resolved run description, written next to each price CSV so a run
/// can be reproduced from its outputs alone.
inline ordered_json meta_json(const FitArtifact& artifact, const PricingConfig& config,
                              const ComparisonTable& table) {
    ordered_json j;
    j["schema"] = "copex-meta/1";
    j["fit"] = artifact_to_json(artifact);
    j["pricing"]["out_of_sample"] = {{"start", config.out_start.to_string()},
                                     {"end", config.out_end.to_string()}};
    j["pricing"]["tau"] = config.tau;
    j["pricing"]["r"] = config.r;
    j["pricing"]["drift"] = to_string(config.drift);
    j["pricing"]["method"] = to_string(config.method);
    j["pricing"]["horizon"] = "fixed_offset_tau"; // expiry = evaluation date + tau
    j["pricing"]["chain"] = {{"burn_in", config.chain.burn_in},
                             {"kept", config.chain.kept},
                             {"thin", config.chain.thin},
                             {"seed", config.chain.seed},
                             {"seed_derivation", "chain_seed[i] = derive_stream(seed, date_index i)"},
                             {"std_error_convention", "naive i.i.d. formula; a lower bound on a dependent chain"}};
    j["pricing"]["quadrature"] = {{"initial_panels", config.quadrature.initial_panels},
                                  {"max_doublings", config.quadrature.max_doublings},
                                  {"tolerance", config.quadrature.tolerance}};
    j["columns"] = table.columns;
    std::size_t failures = 0;
    ordered_json failure_list = ordered_json::array();
    for (const auto& row : table.rows)
        for (std::size_t c = 0; c < row.cells.size(); ++c)
            if (!row.cells[c].ok) {
                ++failures;
                failure_list.push_back({{"date", row.date.to_string()},
                                        {"column", table.columns[c]},
                                        {"error", row.cells[c].error}});
            }
    j["failures"] = failures;
    if (failures > 0) j["failure_detail"] = failure_list;
    return j;
}

} // namespace copex
