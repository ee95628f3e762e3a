#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arriva/calendar.hpp"
#include "arriva/models/model.hpp"

namespace arriva {

/// One stored forecast cell; absent cells keep `present` false (a failed fit
/// leaves holes rather than aborting the run).
struct StoredForecast {
    double point = 0.0;
    std::optional<double> log_point;
    std::optional<double> variance;
    bool present = false;
};

/// Forecasts keyed (producer, origin, horizon). Origins are the consecutive
/// dates from the first forecast origin; horizon h targets origin + h.
class ForecastStore {
  public:
    ForecastStore() = default;
    ForecastStore(Date first_origin, std::size_t n_origins, int horizons, std::string scheme,
                  std::size_t window)
        : first_origin_(first_origin),
          n_origins_(n_origins),
          horizons_(horizons),
          scheme_(std::move(scheme)),
          window_(window) {}

    Date first_origin() const { return first_origin_; }
    std::size_t n_origins() const { return n_origins_; }
    int horizons() const { return horizons_; }
    const std::string& scheme() const { return scheme_; }
    std::size_t window() const { return window_; }
    Date origin_date(std::size_t origin_idx) const {
        return first_origin_ + static_cast<std::int32_t>(origin_idx);
    }

    const std::vector<std::string>& producers() const { return producers_; }
    bool has_producer(const std::string& id) const { return index_.count(id) > 0; }

    void add_producer(const std::string& id) {
        if (index_.count(id)) throw std::invalid_argument("ForecastStore: duplicate producer " + id);
        index_[id] = producers_.size();
        producers_.push_back(id);
        cells_.emplace_back(n_origins_ * static_cast<std::size_t>(horizons_));
        dispersion_.emplace_back();
    }

    void insert(const std::string& producer, std::size_t origin_idx, int horizon,
                StoredForecast f) {
        StoredForecast& slot = cell(producer, origin_idx, horizon);
        if (slot.present)
            throw std::invalid_argument("ForecastStore: duplicate key " + producer + "@" +
                                        std::to_string(origin_idx) + "h" +
                                        std::to_string(horizon));
        f.present = true;
        slot = std::move(f);
    }

    const StoredForecast& at(const std::string& producer, std::size_t origin_idx,
                             int horizon) const {
        return const_cast<ForecastStore*>(this)->cell(producer, origin_idx, horizon);
    }

    /// Count-model dispersion side channel (needed to redraw NegBin densities).
    void set_dispersion(const std::string& producer, std::size_t origin_idx, double alpha) {
        dispersion_[index_.at(producer)][origin_idx] = alpha;
    }
    std::optional<double> dispersion(const std::string& producer, std::size_t origin_idx) const {
        const auto& m = dispersion_[index_.at(producer)];
        const auto it = m.find(origin_idx);
        return it == m.end() ? std::nullopt : std::optional<double>(it->second);
    }

    /// Origins where every listed producer has every horizon in `hs` and the
    /// target stays inside `last_target_idx` (inclusive, relative to origins).
    std::vector<std::size_t> evaluable_origins(const std::vector<std::string>& ids,
                                               const std::vector<int>& hs,
                                               std::size_t n_targets_available) const {
        std::vector<std::size_t> out;
        for (std::size_t o = 0; o < n_origins_; ++o) {
            bool ok = true;
            for (const auto& id : ids) {
                for (int h : hs) {
                    if (o + static_cast<std::size_t>(h) > n_targets_available ||
                        !at(id, o, h).present) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) out.push_back(o);
        }
        return out;
    }

  private:
    StoredForecast& cell(const std::string& producer, std::size_t origin_idx, int horizon) {
        const auto it = index_.find(producer);
        if (it == index_.end())
            throw std::out_of_range("ForecastStore: unknown producer " + producer);
        if (origin_idx >= n_origins_ || horizon < 1 || horizon > horizons_)
            throw std::out_of_range("ForecastStore: key outside the run geometry");
        return cells_[it->second][origin_idx * static_cast<std::size_t>(horizons_) +
                                  static_cast<std::size_t>(horizon - 1)];
    }

    Date first_origin_;
    std::size_t n_origins_ = 0;
    int horizons_ = 0;
    std::string scheme_;
    std::size_t window_ = 0;
    std::vector<std::string> producers_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<StoredForecast>> cells_;
    std::vector<std::map<std::size_t, double>> dispersion_;
};

}  // namespace arriva
