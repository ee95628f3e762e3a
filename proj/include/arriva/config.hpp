#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arriva/engine.hpp"
#include "arriva/evaluate.hpp"

namespace arriva {

using nlohmann::json;

/// Everything a pipeline run needs, parsed from the JSON config file.
/// Unknown keys anywhere in the document are rejected.
struct AppConfig {
    std::string calls_path;
    std::optional<std::string> closing_path;
    RunConfig run;
    EvalConfig eval;
    std::string output_dir = "out";

    json echo;  // the normalized document, embedded in the run manifest
};

namespace config_detail {

inline void expect_keys(const json& obj, const std::string& where,
                        const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

inline std::vector<int> horizon_set(const json& v, int horizons) {
    std::vector<int> hs;
    if (v.is_string() && v.get<std::string>() == "all") {
        for (int h = 1; h <= horizons; ++h) hs.push_back(h);
        return hs;
    }
    if (!v.is_array()) throw std::invalid_argument("config: horizon_sets entries are arrays or \"all\"");
    for (const auto& e : v) {
        const int h = e.get<int>();
        if (h < 1 || h > horizons)
            throw std::invalid_argument(
                "config: loss horizon " + std::to_string(h) +
                " exceeds run.horizons = " + std::to_string(horizons));
        hs.push_back(h);
    }
    return hs;
}

}  // namespace config_detail

inline AppConfig parse_config(const json& doc) {
    using config_detail::expect_keys;
    expect_keys(doc, "document",
                {"data", "run", "loss", "bootstrap", "sla", "payoff", "risk_aversion", "density",
                 "benchmark", "output"});
    AppConfig cfg;
    cfg.echo = doc;

    if (doc.contains("data")) {
        const json& d = doc["data"];
        expect_keys(d, "data", {"calls", "closing_days"});
        if (d.contains("calls")) cfg.calls_path = d["calls"].get<std::string>();
        if (d.contains("closing_days") && !d["closing_days"].is_null())
            cfg.closing_path = d["closing_days"].get<std::string>();
    }

    if (doc.contains("run")) {
        const json& r = doc["run"];
        expect_keys(r, "run",
                    {"scheme", "window", "horizons", "producers", "seed", "refit_every",
                     "auto_select", "fit_starts", "warm_starts", "jobs"});
        if (r.contains("scheme")) {
            const std::string s = r["scheme"].get<std::string>();
            if (s == "recursive")
                cfg.run.scheme = RunConfig::Scheme::recursive;
            else if (s == "rolling")
                cfg.run.scheme = RunConfig::Scheme::rolling;
            else
                throw std::invalid_argument("config: run.scheme must be recursive or rolling");
        }
        if (r.contains("window")) cfg.run.window = r["window"].get<std::size_t>();
        if (r.contains("horizons")) cfg.run.horizons = r["horizons"].get<int>();
        if (r.contains("producers"))
            cfg.run.producers = r["producers"].get<std::vector<std::string>>();
        if (r.contains("seed")) cfg.run.seed = r["seed"].get<std::uint64_t>();
        if (r.contains("refit_every")) cfg.run.refit_every = r["refit_every"].get<int>();
        if (r.contains("auto_select")) cfg.run.auto_select = r["auto_select"].get<bool>();
        if (r.contains("fit_starts")) cfg.run.fit_starts = r["fit_starts"].get<int>();
        if (r.contains("warm_starts")) cfg.run.warm_starts = r["warm_starts"].get<int>();
        if (r.contains("jobs")) cfg.run.jobs = r["jobs"].get<int>();
    }
    for (const auto& id : cfg.run.producers) ProducerId::parse(id);  // fail early

    if (doc.contains("loss")) {
        const json& l = doc["loss"];
        expect_keys(l, "loss", {"rho", "phis", "horizon_sets"});
        const double rho = l.contains("rho") ? l["rho"].get<double>() : 2.0;
        std::vector<double> phis{0.42, 0.50, 0.58};
        if (l.contains("phis")) phis = l["phis"].get<std::vector<double>>();
        std::vector<std::vector<int>> sets;
        if (l.contains("horizon_sets")) {
            for (const auto& v : l["horizon_sets"])
                sets.push_back(config_detail::horizon_set(v, cfg.run.horizons));
        } else {
            for (int h : {1, 7, 28})
                if (h <= cfg.run.horizons) sets.push_back({h});
            sets.push_back(config_detail::horizon_set(json("all"), cfg.run.horizons));
        }
        for (double phi : phis)
            for (const auto& hs : sets) {
                LossConfig lc;
                lc.rho = rho;
                lc.phi = phi;
                lc.horizons = hs;
                lc.validate();
                cfg.eval.loss_grid.push_back(lc);
            }
    }

    if (doc.contains("bootstrap")) {
        const json& b = doc["bootstrap"];
        expect_keys(b, "bootstrap", {"replications", "expected_block_length"});
        if (b.contains("replications"))
            cfg.eval.bootstrap.replications = b["replications"].get<int>();
        if (b.contains("expected_block_length"))
            cfg.eval.bootstrap.expected_block_length = b["expected_block_length"].get<double>();
        cfg.eval.bootstrap.validate();
    }

    if (doc.contains("sla")) {
        const json& s = doc["sla"];
        expect_keys(s, "sla",
                    {"answer_fraction", "answer_seconds", "mean_call_seconds", "hours_open"});
        if (s.contains("answer_fraction"))
            cfg.eval.sla.answer_fraction = s["answer_fraction"].get<double>();
        if (s.contains("answer_seconds"))
            cfg.eval.sla.answer_seconds = s["answer_seconds"].get<double>();
        if (s.contains("mean_call_seconds"))
            cfg.eval.sla.mean_call_seconds = s["mean_call_seconds"].get<double>();
        if (s.contains("hours_open")) cfg.eval.sla.hours_open = s["hours_open"].get<double>();
        cfg.eval.sla.validate();
    }

    if (doc.contains("payoff")) {
        const json& p = doc["payoff"];
        expect_keys(p, "payoff", {"fixed_daily", "buckets"});
        if (p.contains("fixed_daily")) cfg.eval.scheme.fixed_daily = p["fixed_daily"].get<double>();
        if (p.contains("buckets")) {
            cfg.eval.scheme.buckets.clear();
            for (const auto& b : p["buckets"]) {
                if (!b.is_array() || b.size() != 3)
                    throw std::invalid_argument("config: payoff buckets are [lower, upper, euros]");
                PayoffBucket pb;
                pb.lower = b[0].get<double>();
                pb.upper = b[1].is_null() ? std::numeric_limits<double>::infinity()
                                          : b[1].get<double>();
                pb.euros = b[2].get<double>();
                cfg.eval.scheme.buckets.push_back(pb);
            }
        }
        cfg.eval.scheme.validate();
    }

    if (doc.contains("risk_aversion"))
        cfg.eval.lambdas = doc["risk_aversion"].get<std::vector<double>>();
    for (double l : cfg.eval.lambdas)
        if (!(l > 0.0)) throw std::invalid_argument("config: risk_aversion entries must be > 0");

    if (doc.contains("density")) {
        const json& d = doc["density"];
        expect_keys(d, "density", {"draws", "producers"});
        if (d.contains("draws")) cfg.eval.density_draws = d["draws"].get<std::size_t>();
        if (d.contains("producers"))
            cfg.eval.density_producers = d["producers"].get<std::vector<std::string>>();
    }

    if (doc.contains("benchmark")) cfg.eval.benchmark = doc["benchmark"].get<std::string>();
    if (doc.contains("output")) cfg.output_dir = doc["output"].get<std::string>();
    cfg.eval.seed = cfg.run.seed;
    cfg.eval.bootstrap.seed = cfg.run.seed;
    return cfg;
}

inline AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    return parse_config(doc);
}

/// FNV-1a over a file's bytes; the manifest records it for each input.
inline std::uint64_t content_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace arriva
