#include "rvkit/service/archive.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cstring>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rvkit/common/errors.hpp"
#include "rvkit/service/pipeline.hpp"

namespace rvkit {

namespace {

constexpr std::size_t kBlock = 512;

void put_octal(char* field, std::size_t width, std::uint64_t value) {
    const std::string s = fmt::format("{:0{}o}", value, width - 1);
    if (s.size() > width - 1) throw std::invalid_argument("tar: numeric field overflow");
    std::memcpy(field, s.data(), s.size());
    field[width - 1] = '\0';
}

std::uint64_t get_octal(const char* field, std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width && field[i] != '\0' && field[i] != ' '; ++i) {
        if (field[i] < '0' || field[i] > '7') throw IntegrityError("tar: bad octal field");
        v = v * 8 + static_cast<std::uint64_t>(field[i] - '0');
    }
    return v;
}

std::uint64_t header_checksum(const char* h) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < kBlock; ++i) {
        sum += (i >= 148 && i < 156) ? static_cast<unsigned char>(' ') : static_cast<unsigned char>(h[i]);
    }
    return sum;
}

int count_lines(const std::string& csv) {
    return static_cast<int>(std::count(csv.begin(), csv.end(), '\n'));
}

}  // namespace

void TarWriter::add_file(std::string_view name, std::string_view content, std::int64_t mtime) {
    if (name.empty() || name.size() >= 100) throw std::invalid_argument("tar: file name must be 1..99 bytes");
    char h[kBlock] = {};
    std::memcpy(h, name.data(), name.size());
    put_octal(h + 100, 8, 0644);
    put_octal(h + 108, 8, 0);
    put_octal(h + 116, 8, 0);
    put_octal(h + 124, 12, content.size());
    put_octal(h + 136, 12, static_cast<std::uint64_t>(std::max<std::int64_t>(0, mtime)));
    h[156] = '0';
    std::memcpy(h + 257, "ustar", 6);
    std::memcpy(h + 263, "00", 2);
    const std::string sum = fmt::format("{:06o}", header_checksum(h));
    std::memcpy(h + 148, sum.data(), 6);
    h[154] = '\0';
    h[155] = ' ';
    bytes_.append(h, kBlock);
    bytes_.append(content);
    bytes_.append((kBlock - content.size() % kBlock) % kBlock, '\0');
}

std::string TarWriter::finish() {
    bytes_.append(2 * kBlock, '\0');
    return std::move(bytes_);
}

std::vector<TarEntry> read_tar(std::string_view bytes) {
    std::vector<TarEntry> out;
    std::size_t pos = 0;
    while (pos + kBlock <= bytes.size()) {
        const char* h = bytes.data() + pos;
        if (std::all_of(h, h + kBlock, [](char c) { return c == '\0'; })) return out;
        if (std::memcmp(h + 257, "ustar", 5) != 0) throw IntegrityError("tar: not a ustar header");
        if (get_octal(h + 148, 8) != header_checksum(h)) throw IntegrityError("tar: checksum mismatch");
        const std::uint64_t size = get_octal(h + 124, 12);
        pos += kBlock;
        if (pos + size > bytes.size()) throw IntegrityError("tar: truncated entry");
        TarEntry e;
        e.name.assign(h, strnlen(h, 100));
        e.content.assign(bytes.substr(pos, size));
        if (h[156] == '0' || h[156] == '\0') out.push_back(std::move(e));
        pos += (size + kBlock - 1) / kBlock * kBlock;
    }
    throw IntegrityError("tar: missing end blocks");
}

std::optional<ArchiveKind> parse_archive_kind(std::string_view s) {
    if (s == "variance") return ArchiveKind::variance;
    if (s == "covariance") return ArchiveKind::covariance;
    return std::nullopt;
}

std::optional<std::string> build_archive(const MeasureSnapshot& snap, AssetClass asset_class, ArchiveKind kind) {
    static const char* kClassTitle[] = {"Stocks", "Exchange rates", "Futures"};
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> assets;
    std::vector<std::string_view> measures;
    std::optional<Date> first, last;
    auto extend = [&](Date d) {
        if (!first || d < *first) first = d;
        if (!last || d > *last) last = d;
    };
    int records = 0;

    if (kind == ArchiveKind::variance) {
        const auto cls = snap.rows.find(asset_class);
        if (cls == snap.rows.end()) return std::nullopt;
        for (const auto& [symbol, rows] : cls->second) {
            if (rows.empty()) continue;
            std::ostringstream csv;
            write_measures_csv(csv, rows);
            files.emplace_back(symbol + ".csv", csv.str());
            records += static_cast<int>(rows.size());
            assets.push_back(symbol);
            for (const auto& r : rows) extend(r.date);
        }
        measures.assign(measure_names().begin(), measure_names().end());
    } else {
        const auto cls = snap.covariances.find(asset_class);
        if (cls == snap.covariances.end() || cls->second.empty()) return std::nullopt;
        std::set<std::string> universe;
        for (auto name : covariance_names()) {
            std::string csv = "date,asset_i,asset_j,value\n";
            for (const auto& s : cls->second) {
                const Eigen::MatrixXd& m = *s.get(name);
                for (Eigen::Index i = 0; i < m.rows(); ++i) {
                    for (Eigen::Index j = 0; j < m.cols(); ++j) {
                        csv += fmt::format("{},{},{},{:.17g}\n", format_date(s.date),
                                           s.symbols[static_cast<std::size_t>(i)],
                                           s.symbols[static_cast<std::size_t>(j)], m(i, j));
                    }
                }
            }
            records += count_lines(csv) - 1;
            files.emplace_back(std::string(name) + ".csv", std::move(csv));
        }
        for (const auto& s : cls->second) {
            extend(s.date);
            universe.insert(s.symbols.begin(), s.symbols.end());
        }
        assets.assign(universe.begin(), universe.end());
        measures.assign(covariance_names().begin(), covariance_names().end());
    }
    if (files.empty()) return std::nullopt;

    std::string readme;
    readme += fmt::format("Asset type: {}\n", kClassTitle[static_cast<int>(asset_class)]);
    readme += fmt::format("Data type: {}\n", kind == ArchiveKind::variance ? "realized variance measures (daily)"
                                                                           : "realized covariance measures (daily)");
    readme += fmt::format("Date range: {} to {}\n", format_date(*first), format_date(*last));
    readme += fmt::format("Record count: {}\n", records);
    readme += fmt::format("Assets ({}): {}\n", assets.size(), fmt::join(assets, ", "));
    readme += fmt::format("Measures ({}): {}\n", measures.size(), fmt::join(measures, ", "));
    readme += "Files:";
    for (const auto& [name, content] : files) readme += fmt::format(" {} ({} rows);", name, count_lines(content) - 1);
    readme.back() = '\n';
    readme += "Units: daily variance (covariance) of log prices; empty cells are unavailable values.\n";

    TarWriter tar;
    tar.add_file("README.txt", readme);
    for (const auto& [name, content] : files) tar.add_file(name, content);
    return tar.finish();
}

}  // namespace rvkit
