#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arriva/evaluate.hpp"
#include "arriva/series.hpp"
#include "arriva/store.hpp"

namespace arriva::csv {

/// RFC 4180 quoting; all files are UTF-8 with LF line endings.
inline std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// Full-precision float formatting so reruns are byte-identical.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string money(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

class Writer {
  public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote(fields[i]);
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

/// Minimal RFC 4180 reader (quoted fields, doubled quotes, LF or CRLF).
inline std::vector<std::vector<std::string>> read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> current;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    auto end_field = [&] {
        current.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(current);
        current.clear();
        any = false;
    };
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get(c);
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            any = true;
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; any = true; break;
            case ',': end_field(); any = true; break;
            case '\r': break;
            case '\n': end_row(); break;
            default: field += c; any = true;
        }
    }
    if (any || !field.empty() || !current.empty()) end_row();
    return rows;
}

/// Ingests `date,calls` (ISO dates, nonnegative integer calls) plus an
/// optional closing-days file (one ISO date per line) and runs validation
/// and closing-day imputation.
inline ArrivalSeries read_calls(const std::string& calls_path,
                                const std::optional<std::string>& closing_path) {
    const auto rows = read(calls_path);
    if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "date" || rows[0][1] != "calls")
        throw std::runtime_error(calls_path + ": expected header 'date,calls'");
    std::vector<DatedCount> raw;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty() || (rows[i].size() == 1 && rows[i][0].empty())) continue;
        if (rows[i].size() < 2)
            throw std::runtime_error(calls_path + ": short row " + std::to_string(i + 1));
        DatedCount dc;
        dc.date = Date::parse(rows[i][0]);
        const std::string& cell = rows[i][1];
        if (cell.empty() || cell.find_first_not_of("0123456789") != std::string::npos)
            throw std::runtime_error(calls_path + ": calls must be a nonnegative integer, row " +
                                     std::to_string(i + 1));
        dc.count = std::stoll(cell);
        raw.push_back(dc);
    }
    std::vector<Date> closing;
    if (closing_path) {
        std::ifstream in(*closing_path);
        if (!in) throw std::runtime_error("cannot open closing-days file: " + *closing_path);
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (!line.empty()) closing.push_back(Date::parse(line));
        }
    }
    return validate_and_impute(raw, std::move(closing));
}

inline void write_series(const ArrivalSeries& s, const std::string& path) {
    Writer w(path);
    w.row({"date", "calls"});
    for (std::size_t i = 0; i < s.size(); ++i)
        w.row({s.date(i).to_string(), std::to_string(s.count(i))});
}

inline void write_store(const ForecastStore& store, const std::string& path) {
    Writer w(path);
    w.row({"producer", "origin", "horizon", "point", "log_point", "variance"});
    for (const auto& id : store.producers()) {
        for (std::size_t oi = 0; oi < store.n_origins(); ++oi) {
            for (int h = 1; h <= store.horizons(); ++h) {
                const StoredForecast& f = store.at(id, oi, h);
                if (!f.present) continue;
                w.row({id, store.origin_date(oi).to_string(), std::to_string(h), num(f.point),
                       f.log_point ? num(*f.log_point) : "",
                       f.variance ? num(*f.variance) : ""});
            }
        }
    }
}

inline void write_dispersions(const ForecastStore& store, const std::string& path) {
    Writer w(path);
    w.row({"producer", "origin", "dispersion"});
    for (const auto& id : store.producers())
        for (std::size_t oi = 0; oi < store.n_origins(); ++oi)
            if (const auto alpha = store.dispersion(id, oi))
                w.row({id, store.origin_date(oi).to_string(), num(*alpha)});
}

inline void write_rankings(const std::vector<LossTable>& tables, const std::string& path) {
    Writer w(path);
    w.row({"producer", "rho", "phi", "horizon_set", "loss_stat", "rank"});
    for (const auto& table : tables) {
        std::string hs;
        for (std::size_t i = 0; i < table.config.horizons.size(); ++i) {
            if (i) hs += ';';
            hs += std::to_string(table.config.horizons[i]);
        }
        if (table.config.horizons.size() > 1)
            hs = std::to_string(table.config.horizons.front()) + ".." +
                 std::to_string(table.config.horizons.back());
        for (const auto& row : table.rows)
            w.row({row.producer, num(table.config.rho), num(table.config.phi), hs,
                   num(row.statistic), std::to_string(row.rank)});
    }
}

inline void write_tests(const std::vector<StatTestRow>& rows, const std::string& path) {
    Writer w(path);
    w.row({"benchmark", "test", "statistic", "p_value", "bucket"});
    for (const auto& r : rows)
        w.row({r.benchmark, r.test, num(r.statistic), num(r.p_value), p_value_bucket(r.p_value)});
}

/// One file per loss configuration, named mcs_<tag>.csv under `dir`.
inline void write_mcs(const std::vector<McsReport>& reports, const std::string& dir) {
    for (const auto& rep : reports) {
        Writer w(dir + "/mcs_" + rep.tag + ".csv");
        w.row({"producer", "in_mcs", "elimination_p"});
        for (const auto& [id, p] : rep.set.mcs_p_value)
            w.row({id, rep.set.contains(id) ? "1" : "0", num(p)});
    }
}

inline void write_econ(const std::vector<EconRow>& rows, const std::string& path) {
    Writer w(path);
    w.row({"producer", "lambda", "payoff", "eu", "v", "delta_v", "ce", "delta"});
    for (const auto& r : rows)
        w.row({r.producer, num(r.lambda), money(r.payoff), num(r.eu), money(r.value),
               money(r.delta_value), money(r.ce), money(r.delta_ce)});
}

inline void write_density(const std::vector<DensityRow>& rows, const std::string& path) {
    Writer w(path);
    w.row({"producer", "avg_rps", "ecp_05", "ecp_25", "ecp_75", "ecp_95"});
    for (const auto& r : rows)
        w.row({r.producer, num(r.avg_rps), num(r.ecp05), num(r.ecp25), num(r.ecp75),
               num(r.ecp95)});
}

inline void write_optimal_naive(const std::vector<OptNaiveRow>& rows, const std::string& path) {
    Writer w(path);
    w.row({"producer", "rmsfe_ratio"});
    for (const auto& r : rows) w.row({r.producer, num(r.rmsfe_ratio)});
}

}  // namespace arriva::csv
