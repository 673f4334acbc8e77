#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace rvkit::io {

// Minimal Parquet support: one row group, PLAIN-encoded, uncompressed data pages (v1).
// Files written here open in any Parquet reader. The reader accepts the same subset
// (plus nullable columns without nulls) and rejects everything else with IntegrityError.

enum class Annotation { none, utf8, time_millis };

using ColumnData = std::variant<std::vector<std::int32_t>, std::vector<std::int64_t>, std::vector<double>,
                                std::vector<std::string>>;

struct Column {
    std::string name;
    ColumnData data;
    Annotation annotation = Annotation::none;

    [[nodiscard]] std::size_t size() const {
        return std::visit([](const auto& v) { return v.size(); }, data);
    }
};

struct Table {
    std::vector<Column> columns;
    std::vector<std::pair<std::string, std::string>> metadata;

    [[nodiscard]] std::size_t num_rows() const { return columns.empty() ? 0 : columns.front().size(); }
    [[nodiscard]] const Column* find(std::string_view name) const;
    [[nodiscard]] const std::string* meta(std::string_view key) const;

    template <class T>
    const std::vector<T>& get(std::string_view name) const;
};

std::string encode_parquet(const Table& table);
Table decode_parquet(std::string_view bytes);

/// Writes through a temporary sibling file and renames, so readers never see partial files.
void write_parquet(const Table& table, const std::filesystem::path& path);
Table read_parquet(const std::filesystem::path& path);

}  // namespace rvkit::io
