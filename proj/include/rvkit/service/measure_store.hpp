#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rvkit/measures/multivariate.hpp"
#include "rvkit/io/parquet.hpp"
#include "rvkit/measures/univariate.hpp"

namespace rvkit {

/// Immutable view of every stored measure row, indexed by class and symbol.
struct MeasureSnapshot {
    std::map<AssetClass, std::map<std::string, std::vector<DailyMeasures>>> rows;
    std::map<AssetClass, std::vector<CovarianceSet>> covariances;

    /// Rows of a symbol in any class, sorted by date; nullptr when unknown.
    [[nodiscard]] const std::vector<DailyMeasures>* series(const std::string& symbol,
                                                           AssetClass* found_class = nullptr) const;
};

/// Measure persistence: <root>/<class dir>/<SYMBOL>.parquet (one row per day) and
/// <root>/<class dir>/covariances.parquet (long format: date, asset_i, asset_j, measure, value).
/// Readers take snapshots; writers rebuild a snapshot and swap it in.
class MeasureStore {
public:
    explicit MeasureStore(std::filesystem::path root);

    /// Merges rows by (symbol, date), replacing existing days, then refreshes the snapshot.
    void write_measures(AssetClass asset_class, const std::vector<DailyMeasures>& rows);
    void write_covariances(AssetClass asset_class, const std::vector<CovarianceSet>& sets);

    /// Re-reads every file under the root.
    void reload();
    [[nodiscard]] std::shared_ptr<const MeasureSnapshot> snapshot() const;
    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }

    /// Replaces the snapshot without touching disk (tests, in-memory use).
    void install(MeasureSnapshot snap);

private:
    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::shared_ptr<const MeasureSnapshot> snap_;
};

io::Table measures_to_table(const std::vector<DailyMeasures>& rows);
std::vector<DailyMeasures> measures_from_table(const io::Table& table);
io::Table covariances_to_table(const std::vector<CovarianceSet>& sets);
std::vector<CovarianceSet> covariances_from_table(const io::Table& table);

}  // namespace rvkit
