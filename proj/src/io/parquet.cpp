#include "rvkit/io/parquet.hpp"

#include <zlib.h>

#include <atomic>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include "rvkit/common/errors.hpp"

namespace rvkit::io {

namespace {

constexpr std::string_view kMagic = "PAR1";

// parquet.thrift enums
enum PhysicalType : std::int32_t { kInt32 = 1, kInt64 = 2, kDouble = 5, kByteArray = 6 };
enum ConvertedType : std::int32_t { kUtf8 = 0, kTimeMillis = 7 };
enum Repetition : std::int32_t { kRequired = 0, kOptional = 1 };
enum Encoding : std::int32_t { kPlain = 0, kRle = 3 };
enum PageType : std::int32_t { kDataPage = 0 };

// Thrift compact protocol wire types
enum WireType : std::uint8_t {
    kStop = 0,
    kTrue = 1,
    kFalse = 2,
    kByte = 3,
    kI16 = 4,
    kI32 = 5,
    kI64 = 6,
    kDoubleW = 7,
    kBinary = 8,
    kList = 9,
    kSet = 10,
    kMap = 11,
    kStruct = 12,
};

class CompactWriter {
public:
    std::string& bytes() { return out_; }

    void begin_struct(std::int16_t id) {
        field(id, kStruct);
        enter();
    }
    void begin_struct_element() { enter(); }
    void end_struct() {
        out_.push_back(static_cast<char>(kStop));
        last_ = stack_.back();
        stack_.pop_back();
    }
    void i32(std::int16_t id, std::int32_t v) {
        field(id, kI32);
        varint(zigzag(v));
    }
    void i64(std::int16_t id, std::int64_t v) {
        field(id, kI64);
        varint(zigzag(v));
    }
    void binary(std::int16_t id, std::string_view s) {
        field(id, kBinary);
        raw_binary(s);
    }
    void list(std::int16_t id, std::uint8_t elem, std::size_t n) {
        field(id, kList);
        list_header(elem, n);
    }
    void list_i32_element(std::int32_t v) { varint(zigzag(v)); }
    void raw_binary(std::string_view s) {
        varint(s.size());
        out_.append(s);
    }

private:
    void enter() {
        stack_.push_back(last_);
        last_ = 0;
    }
    void field(std::int16_t id, std::uint8_t type) {
        const int delta = id - last_;
        if (delta > 0 && delta <= 15) {
            out_.push_back(static_cast<char>((delta << 4) | type));
        } else {
            out_.push_back(static_cast<char>(type));
            varint(zigzag(static_cast<std::int64_t>(id)));
        }
        last_ = id;
    }
    void list_header(std::uint8_t elem, std::size_t n) {
        if (n < 15) {
            out_.push_back(static_cast<char>((n << 4) | elem));
        } else {
            out_.push_back(static_cast<char>(0xF0 | elem));
            varint(n);
        }
    }
    static std::uint64_t zigzag(std::int64_t v) {
        return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
    }
    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            out_.push_back(static_cast<char>((v & 0x7F) | 0x80));
            v >>= 7;
        }
        out_.push_back(static_cast<char>(v));
    }

    std::string out_;
    std::int16_t last_ = 0;
    std::vector<std::int16_t> stack_;
};

// Generic decoded thrift value; enough to walk FileMetaData and PageHeader.
struct TValue;
using TStruct = std::map<std::int16_t, TValue>;
struct TValue {
    std::variant<std::int64_t, bool, double, std::string, std::vector<TValue>, std::shared_ptr<TStruct>> v;
};

class CompactReader {
public:
    explicit CompactReader(std::string_view data) : data_(data) {}

    std::size_t position() const { return pos_; }

    TStruct read_struct(int depth = 0) {
        if (depth > 32) throw IntegrityError("parquet metadata nests too deeply");
        TStruct out;
        std::int16_t last = 0;
        while (true) {
            const std::uint8_t header = byte();
            if (header == kStop) break;
            const std::uint8_t type = header & 0x0F;
            const int delta = header >> 4;
            std::int16_t id = 0;
            if (delta != 0) {
                id = static_cast<std::int16_t>(last + delta);
            } else {
                id = static_cast<std::int16_t>(unzigzag(varint()));
            }
            last = id;
            out[id] = read_value(type, depth);
        }
        return out;
    }

private:
    TValue read_value(std::uint8_t type, int depth) {
        switch (type) {
            case kTrue: return TValue{true};
            case kFalse: return TValue{false};
            case kByte: return TValue{static_cast<std::int64_t>(static_cast<std::int8_t>(byte()))};
            case kI16:
            case kI32:
            case kI64: return TValue{unzigzag(varint())};
            case kDoubleW: {
                need(8);
                double d;
                std::memcpy(&d, data_.data() + pos_, 8);
                pos_ += 8;
                return TValue{d};
            }
            case kBinary: {
                const auto n = varint();
                need(n);
                std::string s(data_.substr(pos_, n));
                pos_ += n;
                return TValue{std::move(s)};
            }
            case kList:
            case kSet: {
                const std::uint8_t h = byte();
                std::uint64_t n = h >> 4;
                const std::uint8_t elem = h & 0x0F;
                if (n == 15) n = varint();
                if (n > data_.size()) throw IntegrityError("parquet list length exceeds file size");
                std::vector<TValue> items;
                items.reserve(n);
                for (std::uint64_t i = 0; i < n; ++i) {
                    if (elem == kTrue || elem == kFalse) {
                        items.push_back(TValue{byte() == kTrue});
                    } else {
                        items.push_back(read_value(elem, depth + 1));
                    }
                }
                return TValue{std::move(items)};
            }
            case kMap: {
                const auto n = varint();
                if (n == 0) return TValue{std::vector<TValue>{}};
                const std::uint8_t kv = byte();
                std::vector<TValue> items;
                for (std::uint64_t i = 0; i < n; ++i) {
                    items.push_back(read_value(kv >> 4, depth + 1));
                    items.push_back(read_value(kv & 0x0F, depth + 1));
                }
                return TValue{std::move(items)};
            }
            case kStruct: return TValue{std::make_shared<TStruct>(read_struct(depth + 1))};
            default: throw IntegrityError("unknown thrift wire type in parquet metadata");
        }
    }
    void need(std::uint64_t n) const {
        if (pos_ + n > data_.size()) throw IntegrityError("truncated parquet metadata");
    }
    std::uint8_t byte() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint64_t varint() {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            const std::uint8_t b = byte();
            v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
            if ((b & 0x80) == 0) return v;
        }
        throw IntegrityError("malformed varint in parquet metadata");
    }
    static std::int64_t unzigzag(std::uint64_t v) {
        return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

const TValue* field(const TStruct& s, std::int16_t id) {
    auto it = s.find(id);
    return it == s.end() ? nullptr : &it->second;
}

std::int64_t need_int(const TStruct& s, std::int16_t id, const char* what) {
    const auto* v = field(s, id);
    if (!v || !std::holds_alternative<std::int64_t>(v->v)) {
        throw IntegrityError(std::string("parquet metadata lacks ") + what);
    }
    return std::get<std::int64_t>(v->v);
}

std::int64_t int_or(const TStruct& s, std::int16_t id, std::int64_t fallback) {
    const auto* v = field(s, id);
    if (!v || !std::holds_alternative<std::int64_t>(v->v)) return fallback;
    return std::get<std::int64_t>(v->v);
}

const std::string* str_field(const TStruct& s, std::int16_t id) {
    const auto* v = field(s, id);
    if (!v || !std::holds_alternative<std::string>(v->v)) return nullptr;
    return &std::get<std::string>(v->v);
}

const std::vector<TValue>& need_list(const TStruct& s, std::int16_t id, const char* what) {
    const auto* v = field(s, id);
    if (!v || !std::holds_alternative<std::vector<TValue>>(v->v)) {
        throw IntegrityError(std::string("parquet metadata lacks ") + what);
    }
    return std::get<std::vector<TValue>>(v->v);
}

const TStruct& as_struct(const TValue& v, const char* what) {
    if (!std::holds_alternative<std::shared_ptr<TStruct>>(v.v)) {
        throw IntegrityError(std::string("malformed parquet ") + what);
    }
    return *std::get<std::shared_ptr<TStruct>>(v.v);
}

const TStruct* struct_field(const TStruct& s, std::int16_t id) {
    const auto* v = field(s, id);
    if (!v || !std::holds_alternative<std::shared_ptr<TStruct>>(v->v)) return nullptr;
    return std::get<std::shared_ptr<TStruct>>(v->v).get();
}

std::int32_t physical_type(const ColumnData& d) {
    switch (d.index()) {
        case 0: return kInt32;
        case 1: return kInt64;
        case 2: return kDouble;
        default: return kByteArray;
    }
}

template <class T>
void append_le(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

std::string plain_values(const ColumnData& d) {
    std::string out;
    std::visit(
        [&](const auto& values) {
            using V = typename std::decay_t<decltype(values)>::value_type;
            if constexpr (std::is_same_v<V, std::string>) {
                for (const auto& s : values) {
                    append_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
                    out.append(s);
                }
            } else {
                out.resize(values.size() * sizeof(V));
                if (!values.empty()) std::memcpy(out.data(), values.data(), out.size());
            }
        },
        d);
    return out;
}

std::uint32_t crc_of(std::string_view bytes) {
    return static_cast<std::uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

// RLE / bit-packed hybrid decoding of definition levels with bit width 1.
std::vector<std::uint8_t> decode_levels(std::string_view data, std::size_t count) {
    std::vector<std::uint8_t> levels;
    levels.reserve(count);
    std::size_t pos = 0;
    auto varint = [&]() {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            if (pos >= data.size()) throw IntegrityError("truncated definition levels");
            const auto b = static_cast<std::uint8_t>(data[pos++]);
            v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
            if ((b & 0x80) == 0) return v;
        }
        throw IntegrityError("malformed definition levels");
    };
    while (levels.size() < count) {
        const auto header = varint();
        if (header & 1) {
            const std::size_t groups = header >> 1;
            for (std::size_t g = 0; g < groups; ++g) {
                if (pos >= data.size()) throw IntegrityError("truncated definition levels");
                const auto b = static_cast<std::uint8_t>(data[pos++]);
                for (int bit = 0; bit < 8 && levels.size() < count; ++bit) levels.push_back((b >> bit) & 1);
            }
        } else {
            const std::size_t run = header >> 1;
            if (pos >= data.size()) throw IntegrityError("truncated definition levels");
            const auto value = static_cast<std::uint8_t>(data[pos++] & 1);
            for (std::size_t r = 0; r < run && levels.size() < count; ++r) levels.push_back(value);
        }
    }
    return levels;
}

template <class T>
void read_plain(std::string_view data, std::size_t n, std::vector<T>& out) {
    if constexpr (std::is_same_v<T, std::string>) {
        std::size_t pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pos + 4 > data.size()) throw IntegrityError("truncated byte array values");
            std::uint32_t len;
            std::memcpy(&len, data.data() + pos, 4);
            pos += 4;
            if (pos + len > data.size()) throw IntegrityError("truncated byte array values");
            out.emplace_back(data.substr(pos, len));
            pos += len;
        }
    } else {
        if (n * sizeof(T) > data.size()) throw IntegrityError("truncated column values");
        const std::size_t start = out.size();
        out.resize(start + n);
        if (n) std::memcpy(out.data() + start, data.data(), n * sizeof(T));
    }
}

}  // namespace

const Column* Table::find(std::string_view name) const {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

const std::string* Table::meta(std::string_view key) const {
    for (const auto& [k, v] : metadata) {
        if (k == key) return &v;
    }
    return nullptr;
}

template <class T>
const std::vector<T>& Table::get(std::string_view name) const {
    const auto* c = find(name);
    if (!c) throw IntegrityError("missing column '" + std::string(name) + "'");
    const auto* v = std::get_if<std::vector<T>>(&c->data);
    if (!v) throw IntegrityError("column '" + std::string(name) + "' has an unexpected type");
    return *v;
}

template const std::vector<std::int32_t>& Table::get(std::string_view) const;
template const std::vector<std::int64_t>& Table::get(std::string_view) const;
template const std::vector<double>& Table::get(std::string_view) const;
template const std::vector<std::string>& Table::get(std::string_view) const;

std::string encode_parquet(const Table& table) {
    const std::size_t rows = table.num_rows();
    for (const auto& c : table.columns) {
        if (c.size() != rows) throw std::invalid_argument("column '" + c.name + "' has a mismatched length");
    }
    std::string file(kMagic);

    struct ChunkInfo {
        std::int64_t offset;
        std::int64_t size;
    };
    std::vector<ChunkInfo> chunks;
    if (rows > 0) {
        for (const auto& c : table.columns) {
            const std::string values = plain_values(c.data);
            CompactWriter h;
            h.i32(1, kDataPage);
            h.i32(2, static_cast<std::int32_t>(values.size()));
            h.i32(3, static_cast<std::int32_t>(values.size()));
            h.i32(4, static_cast<std::int32_t>(crc_of(values)));
            h.begin_struct(5);
            h.i32(1, static_cast<std::int32_t>(rows));
            h.i32(2, kPlain);
            h.i32(3, kRle);
            h.i32(4, kRle);
            h.end_struct();
            h.bytes().push_back(static_cast<char>(kStop));
            const auto offset = static_cast<std::int64_t>(file.size());
            file += h.bytes();
            file += values;
            chunks.push_back({offset, static_cast<std::int64_t>(file.size()) - offset});
        }
    }

    CompactWriter m;
    m.i32(1, 1);
    m.list(2, kStruct, table.columns.size() + 1);
    m.begin_struct_element();
    m.binary(4, "schema");
    m.i32(5, static_cast<std::int32_t>(table.columns.size()));
    m.end_struct();
    for (const auto& c : table.columns) {
        m.begin_struct_element();
        m.i32(1, physical_type(c.data));
        m.i32(3, kRequired);
        m.binary(4, c.name);
        if (c.annotation == Annotation::utf8 || (c.annotation == Annotation::none && c.data.index() == 3)) {
            m.i32(6, kUtf8);
        } else if (c.annotation == Annotation::time_millis) {
            m.i32(6, kTimeMillis);
        }
        m.end_struct();
    }
    m.i64(3, static_cast<std::int64_t>(rows));
    if (rows > 0) {
        m.list(4, kStruct, 1);
        m.begin_struct_element();
        m.list(1, kStruct, table.columns.size());
        std::int64_t total = 0;
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            const auto& c = table.columns[i];
            total += chunks[i].size;
            m.begin_struct_element();
            m.i64(2, chunks[i].offset);
            m.begin_struct(3);
            m.i32(1, physical_type(c.data));
            m.list(2, kI32, 2);
            m.list_i32_element(kPlain);
            m.list_i32_element(kRle);
            m.list(3, kBinary, 1);
            m.raw_binary(c.name);
            m.i32(4, 0);
            m.i64(5, static_cast<std::int64_t>(rows));
            m.i64(6, chunks[i].size);
            m.i64(7, chunks[i].size);
            m.i64(9, chunks[i].offset);
            m.end_struct();
            m.end_struct();
        }
        m.i64(2, total);
        m.i64(3, static_cast<std::int64_t>(rows));
        m.end_struct();
    } else {
        m.list(4, kStruct, 0);
    }
    if (!table.metadata.empty()) {
        m.list(5, kStruct, table.metadata.size());
        for (const auto& [k, v] : table.metadata) {
            m.begin_struct_element();
            m.binary(1, k);
            m.binary(2, v);
            m.end_struct();
        }
    }
    m.binary(6, "rvkit parquet writer");
    m.bytes().push_back(static_cast<char>(kStop));

    file += m.bytes();
    append_le<std::uint32_t>(file, static_cast<std::uint32_t>(m.bytes().size()));
    file += kMagic;
    return file;
}

Table decode_parquet(std::string_view bytes) {
    if (bytes.size() < 12 || bytes.substr(0, 4) != kMagic || bytes.substr(bytes.size() - 4) != kMagic) {
        throw IntegrityError("not a parquet file (bad magic)");
    }
    std::uint32_t meta_len;
    std::memcpy(&meta_len, bytes.data() + bytes.size() - 8, 4);
    if (meta_len > bytes.size() - 12) throw IntegrityError("parquet footer length out of range");
    CompactReader footer(bytes.substr(bytes.size() - 8 - meta_len, meta_len));
    const TStruct meta = footer.read_struct();

    Table table;
    const auto& schema = need_list(meta, 2, "schema");
    if (schema.empty()) throw IntegrityError("empty parquet schema");
    const auto& root = as_struct(schema[0], "schema root");
    const auto ncols = static_cast<std::size_t>(int_or(root, 5, 0));
    if (ncols + 1 != schema.size()) throw IntegrityError("nested parquet schemas are not supported");

    std::vector<std::int32_t> types;
    std::vector<std::int32_t> repetition;
    for (std::size_t i = 1; i < schema.size(); ++i) {
        const auto& el = as_struct(schema[i], "schema element");
        if (field(el, 5)) throw IntegrityError("nested parquet schemas are not supported");
        const auto* name = str_field(el, 4);
        if (!name) throw IntegrityError("parquet column without a name");
        const auto type = static_cast<std::int32_t>(need_int(el, 1, "column type"));
        const auto conv = int_or(el, 6, -1);
        Column col;
        col.name = *name;
        switch (type) {
            case kInt32: col.data = std::vector<std::int32_t>{}; break;
            case kInt64: col.data = std::vector<std::int64_t>{}; break;
            case kDouble: col.data = std::vector<double>{}; break;
            case kByteArray: col.data = std::vector<std::string>{}; break;
            default: throw IntegrityError("unsupported parquet physical type in column '" + *name + "'");
        }
        if (conv == kUtf8) col.annotation = Annotation::utf8;
        if (conv == kTimeMillis) col.annotation = Annotation::time_millis;
        types.push_back(type);
        repetition.push_back(static_cast<std::int32_t>(int_or(el, 3, kRequired)));
        table.columns.push_back(std::move(col));
    }

    const auto num_rows = need_int(meta, 3, "row count");
    const auto& groups = need_list(meta, 4, "row groups");
    for (const auto& g : groups) {
        const auto& group = as_struct(g, "row group");
        const auto& chunks = need_list(group, 1, "column chunks");
        if (chunks.size() != ncols) throw IntegrityError("row group column count mismatch");
        for (std::size_t ci = 0; ci < ncols; ++ci) {
            const auto& chunk = as_struct(chunks[ci], "column chunk");
            const auto* cm = struct_field(chunk, 3);
            if (!cm) throw IntegrityError("column chunk without metadata");
            if (need_int(*cm, 1, "chunk type") != types[ci]) throw IntegrityError("chunk type mismatch");
            if (need_int(*cm, 4, "codec") != 0) {
                throw IntegrityError("compressed parquet columns are not supported");
            }
            const auto values_expected = need_int(*cm, 5, "chunk value count");
            auto offset = int_or(*cm, 11, -1);
            if (offset < 0) offset = need_int(*cm, 9, "data page offset");
            std::int64_t seen = 0;
            auto pos = static_cast<std::size_t>(offset);
            while (seen < values_expected) {
                if (pos >= bytes.size() - 8 - meta_len) throw IntegrityError("data page offset out of range");
                CompactReader ph_reader(bytes.substr(pos, bytes.size() - 8 - meta_len - pos));
                const TStruct ph = ph_reader.read_struct();
                pos += ph_reader.position();
                const auto page_type = need_int(ph, 1, "page type");
                const auto size = static_cast<std::size_t>(need_int(ph, 3, "page size"));
                if (page_type != kDataPage) throw IntegrityError("only v1 data pages are supported");
                if (pos + size > bytes.size() - 8 - meta_len) throw IntegrityError("page runs past end of data");
                std::string_view page = bytes.substr(pos, size);
                pos += size;
                if (const auto* crc = field(ph, 4); crc && std::holds_alternative<std::int64_t>(crc->v)) {
                    if (static_cast<std::uint32_t>(std::get<std::int64_t>(crc->v)) != crc_of(page)) {
                        throw IntegrityError("page checksum mismatch in column '" + table.columns[ci].name + "'");
                    }
                }
                const auto* dph = struct_field(ph, 5);
                if (!dph) throw IntegrityError("data page header missing");
                const auto n = static_cast<std::size_t>(need_int(*dph, 1, "page value count"));
                if (need_int(*dph, 2, "page encoding") != kPlain) {
                    throw IntegrityError("only PLAIN encoding is supported");
                }
                if (repetition[ci] == kOptional) {
                    if (page.size() < 4) throw IntegrityError("truncated definition levels");
                    std::uint32_t len;
                    std::memcpy(&len, page.data(), 4);
                    if (4 + static_cast<std::size_t>(len) > page.size()) {
                        throw IntegrityError("truncated definition levels");
                    }
                    const auto levels = decode_levels(page.substr(4, len), n);
                    for (auto l : levels) {
                        if (l == 0) throw IntegrityError("null values are not supported");
                    }
                    page = page.substr(4 + len);
                } else if (repetition[ci] != kRequired) {
                    throw IntegrityError("repeated parquet columns are not supported");
                }
                std::visit([&](auto& out) { read_plain(page, n, out); }, table.columns[ci].data);
                seen += static_cast<std::int64_t>(n);
            }
        }
    }
    for (const auto& c : table.columns) {
        if (static_cast<std::int64_t>(c.size()) != num_rows) throw IntegrityError("row count mismatch");
    }
    if (const auto* kvs = field(meta, 5); kvs && std::holds_alternative<std::vector<TValue>>(kvs->v)) {
        for (const auto& kv : std::get<std::vector<TValue>>(kvs->v)) {
            const auto& s = as_struct(kv, "key/value metadata");
            const auto* k = str_field(s, 1);
            const auto* v = str_field(s, 2);
            if (k) table.metadata.emplace_back(*k, v ? *v : std::string{});
        }
    }
    return table;
}

void write_parquet(const Table& table, const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    const std::string bytes = encode_parquet(table);
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec && !fs::is_directory(path.parent_path())) {
            throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    static std::atomic<unsigned> counter{0};
    std::ostringstream suffix;
    suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + suffix.str());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

Table read_parquet(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_parquet(bytes);
    } catch (const IntegrityError& e) {
        throw IntegrityError(path.string() + ": " + e.what());
    }
}

}  // namespace rvkit::io
