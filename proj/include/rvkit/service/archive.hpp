#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvkit/service/measure_store.hpp"

namespace rvkit {

/// In-memory POSIX ustar writer; regular files only.
class TarWriter {
public:
    void add_file(std::string_view name, std::string_view content, std::int64_t mtime = 0);
    /// Appends the two zero end blocks and returns the archive bytes.
    std::string finish();

private:
    std::string bytes_;
};

struct TarEntry {
    std::string name;
    std::string content;
};

/// Reads archives produced by TarWriter (ustar, regular files). Throws IntegrityError on bad headers.
std::vector<TarEntry> read_tar(std::string_view bytes);

enum class ArchiveKind { variance, covariance };
std::optional<ArchiveKind> parse_archive_kind(std::string_view s);

/// Bulk download for one class: CSV files plus README.txt. nullopt when nothing is stored.
/// variance: <SYMBOL>.csv with every measure column; covariance: one <measure>.csv per matrix
/// measure in long format (date,asset_i,asset_j,value).
std::optional<std::string> build_archive(const MeasureSnapshot& snap, AssetClass asset_class, ArchiveKind kind);

}  // namespace rvkit
