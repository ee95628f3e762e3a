#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "arriva/csv.hpp"

namespace arriva {

/// Renders the run directory's evaluation CSVs as markdown tables (rankings,
/// test buckets, confidence-set membership, economics, retransformation
/// ratios, density scores). Pure function of the files, so regeneration is
/// idempotent.
namespace report {

namespace detail {

using Rows = std::vector<std::vector<std::string>>;

inline bool is_model_id(const std::string& id) { return !id.empty() && id[0] == 'M'; }

inline Rows body(const Rows& rows) {
    return rows.size() <= 1 ? Rows{} : Rows(rows.begin() + 1, rows.end());
}

inline std::vector<std::string> ordered_keys(const Rows& rows, std::size_t col) {
    std::vector<std::string> keys;
    for (const auto& r : rows)
        if (std::find(keys.begin(), keys.end(), r[col]) == keys.end()) keys.push_back(r[col]);
    return keys;
}

inline void pipe_row(std::ostringstream& md, const std::vector<std::string>& cells) {
    md << '|';
    for (const auto& c : cells) md << ' ' << c << " |";
    md << '\n';
}

inline void pipe_header(std::ostringstream& md, const std::vector<std::string>& cells) {
    pipe_row(md, cells);
    md << '|';
    for (std::size_t i = 0; i < cells.size(); ++i) md << "---|";
    md << '\n';
}

}  // namespace detail

inline std::string render(const std::string& run_dir) {
    using detail::Rows;
    std::ostringstream md;
    md << "# Forecast evaluation report\n";
    auto pretty = [](const std::string& value) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", std::stod(value));
        return std::string(buf);
    };
    auto pretty_lambda = [](const std::string& value) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", std::stod(value));
        return std::string(buf);
    };

    auto try_read = [&](const std::string& name) -> Rows {
        try {
            return detail::body(csv::read(run_dir + "/" + name));
        } catch (const std::exception&) {
            return {};
        }
    };

    // Rankings: producers x configurations, rank with the within-class rank
    // (models vs combinations) in brackets.
    const Rows rankings = try_read("rankings.csv");
    if (!rankings.empty()) {
        struct Key {
            std::string phi, hs;
        };
        std::vector<std::string> cfgs;
        for (const auto& r : rankings) {
            const std::string tag = "h" + r[3] + " phi=" + pretty(r[2]);
            if (std::find(cfgs.begin(), cfgs.end(), tag) == cfgs.end()) cfgs.push_back(tag);
        }
        const std::vector<std::string> producers = detail::ordered_keys(rankings, 0);
        std::map<std::string, std::map<std::string, int>> rank;   // cfg -> producer -> rank
        std::map<std::string, std::map<std::string, int>> class_rank;
        for (const auto& cfg : cfgs) {
            std::vector<std::pair<int, std::string>> models, combos;
            for (const auto& r : rankings) {
                if ("h" + r[3] + " phi=" + pretty(r[2]) != cfg) continue;
                const int rk = std::stoi(r[5]);
                rank[cfg][r[0]] = rk;
                (detail::is_model_id(r[0]) ? models : combos).push_back({rk, r[0]});
            }
            for (auto* side : {&models, &combos}) {
                std::sort(side->begin(), side->end());
                for (std::size_t i = 0; i < side->size(); ++i)
                    class_rank[cfg][(*side)[i].second] = static_cast<int>(i) + 1;
            }
        }
        md << "\n## Rankings by flexible loss\n\n"
           << "Cells show the overall rank with the within-class rank (models and"
           << " combinations separately) in brackets.\n\n";
        std::vector<std::string> header{"producer"};
        header.insert(header.end(), cfgs.begin(), cfgs.end());
        detail::pipe_header(md, header);
        for (const auto& p : producers) {
            std::vector<std::string> cells{p};
            for (const auto& cfg : cfgs) {
                const auto it = rank[cfg].find(p);
                cells.push_back(it == rank[cfg].end()
                                    ? "."
                                    : std::to_string(it->second) + " [" +
                                          std::to_string(class_rank[cfg][p]) + "]");
            }
            detail::pipe_row(md, cells);
        }
    }

    // Reality-check buckets per benchmark.
    const Rows tests = try_read("tests.csv");
    if (!tests.empty()) {
        std::vector<std::string> cfgs;
        for (const auto& r : tests) {
            if (r[1].rfind("spa[", 0) != 0) continue;
            const std::string tag = r[1].substr(4, r[1].size() - 5);
            if (std::find(cfgs.begin(), cfgs.end(), tag) == cfgs.end()) cfgs.push_back(tag);
        }
        if (!cfgs.empty()) {
            md << "\n## Reality check (superior predictive ability)\n\n"
               << "\"-\" p < 0.05, \"\\*\" 0.05 <= p < 0.1, \"\\*\\*\" p >= 0.1; the null is"
               << " that the benchmark matches the best alternative.\n\n";
            std::vector<std::string> producers;
            for (const auto& r : tests)
                if (r[1].rfind("spa[", 0) == 0 &&
                    std::find(producers.begin(), producers.end(), r[0]) == producers.end())
                    producers.push_back(r[0]);
            std::vector<std::string> header{"benchmark"};
            header.insert(header.end(), cfgs.begin(), cfgs.end());
            detail::pipe_header(md, header);
            for (const auto& p : producers) {
                std::vector<std::string> cells{p};
                for (const auto& cfg : cfgs) {
                    std::string cell = ".";
                    for (const auto& r : tests)
                        if (r[0] == p && r[1] == "spa[" + cfg + "]")
                            cell = r[4] == "*" ? "\\*" : r[4] == "**" ? "\\*\\*" : r[4];
                    cells.push_back(cell);
                }
                detail::pipe_row(md, cells);
            }
        }
    }

    // Model confidence set membership, one mcs_<tag>.csv file per config.
    std::vector<std::pair<std::string, Rows>> mcs_files;
    {
        std::vector<std::string> names;
        for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("mcs_", 0) == 0 && name.size() > 8 &&
                name.substr(name.size() - 4) == ".csv")
                names.push_back(name);
        }
        std::sort(names.begin(), names.end());
        for (const auto& name : names)
            mcs_files.emplace_back(name.substr(4, name.size() - 8), try_read(name));
    }
    if (!mcs_files.empty()) {
        std::vector<std::string> producers;
        for (const auto& [tag, rows] : mcs_files)
            for (const auto& r : rows)
                if (std::find(producers.begin(), producers.end(), r[0]) == producers.end())
                    producers.push_back(r[0]);
        std::sort(producers.begin(), producers.end());
        md << "\n## Model confidence set (90% level)\n\n";
        std::vector<std::string> header{"producer"};
        for (const auto& [tag, rows] : mcs_files) header.push_back(tag);
        detail::pipe_header(md, header);
        for (const auto& p : producers) {
            std::vector<std::string> cells{p};
            for (const auto& [tag, rows] : mcs_files) {
                std::string cell = ".";
                for (const auto& r : rows)
                    if (r[0] == p) cell = r[1] == "1" ? "yes" : "-";
                cells.push_back(cell);
            }
            detail::pipe_row(md, cells);
        }
    }

    // Economic evaluation.
    const Rows econ = try_read("econ.csv");
    if (!econ.empty()) {
        const std::vector<std::string> lambdas = detail::ordered_keys(econ, 1);
        const std::vector<std::string> producers = detail::ordered_keys(econ, 0);
        md << "\n## Economic evaluation (one-day-ahead)\n\n"
           << "Willingness to pay (delta, Euro) and incremental value of information"
           << " (delta V, Euro) against the benchmark.\n\n";
        std::vector<std::string> header{"producer"};
        for (const auto& l : lambdas) header.push_back("delta @ lambda=" + pretty_lambda(l));
        for (const auto& l : lambdas) header.push_back("dV @ lambda=" + pretty_lambda(l));
        detail::pipe_header(md, header);
        for (const auto& p : producers) {
            std::vector<std::string> cells{p};
            for (std::size_t want = 0; want < 2; ++want)
                for (const auto& l : lambdas)
                    for (const auto& r : econ)
                        if (r[0] == p && r[1] == l) cells.push_back(want == 0 ? r[7] : r[5]);
            detail::pipe_row(md, cells);
        }
    }

    // Naive vs optimal retransformation.
    const Rows opt = try_read("optimal_naive.csv");
    if (!opt.empty()) {
        md << "\n## Naive vs bias-corrected retransformation (h = 1)\n\n"
           << "Entries are RMSFE(optimal) / RMSFE(naive); below one favors the"
           << " variance correction.\n\n";
        detail::pipe_header(md, {"producer", "rmsfe ratio"});
        for (const auto& r : opt) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", std::stod(r[1]));
            detail::pipe_row(md, {r[0], buf});
        }
    }

    // Density evaluation.
    const Rows density = try_read("density.csv");
    if (!density.empty()) {
        md << "\n## Density forecast evaluation (h = 1)\n\n"
           << "Average ranked probability score and empirical coverage of the 5/25/75/95%"
           << " central prediction intervals.\n\n";
        detail::pipe_header(md, {"producer", "RPS", "5%", "25%", "75%", "95%"});
        for (const auto& r : density) {
            auto pct = [](const std::string& s) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * std::stod(s));
                return std::string(buf);
            };
            char rps[32];
            std::snprintf(rps, sizeof(rps), "%.2f", std::stod(r[1]));
            detail::pipe_row(md, {r[0], rps, pct(r[2]), pct(r[3]), pct(r[4]), pct(r[5])});
        }
    }
    return md.str();
}

}  // namespace report
}  // namespace arriva
