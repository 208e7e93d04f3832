#include "wastebench/deepfeat.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "wastebench/errors.hpp"

namespace fs = std::filesystem;

namespace wastebench {

static_assert(std::endian::native == std::endian::little, "FMX1 codec assumes a little-endian host");

void FeatureMatrix::validate() const {
    if (d == 0) throw ValidationError("feature dimension must be positive");
    if (values.size() != static_cast<std::size_t>(n) * d) throw ValidationError("value count differs from n*d");
    if (sample_ids.size() != n) throw ValidationError("sample id count differs from n");
    if (source_tag.size() > 0xFFFF) throw ValidationError("source tag too long");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ValidationError("non-finite value at row " + std::to_string(i / d) + ", column " +
                                  std::to_string(i % d));
        }
    }
    std::set<std::string_view> seen;
    for (const auto& id : sample_ids) {
        if (id.size() > 0xFFFF) throw ValidationError("sample id too long");
        if (!seen.insert(id).second) throw ValidationError("duplicate sample id '" + id + "'");
    }
}

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    template <typename T>
    T get(const char* what) {
        need(sizeof(T), what);
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string string(std::size_t len, const char* what) {
        need(len, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
        pos_ += len;
        return s;
    }
    void need(std::size_t len, const char* what) const {
        if (bytes_.size() - pos_ < len) throw FormatError(std::string("truncated file while reading ") + what);
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    const std::uint8_t* cursor() const { return bytes_.data() + pos_; }
    void skip(std::size_t len) { pos_ += len; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_matrix(const FeatureMatrix& m) {
    m.validate();
    std::vector<std::uint8_t> out;
    out.reserve(14 + m.source_tag.size() + m.values.size() * 4);
    out.insert(out.end(), {'F', 'M', 'X', '1'});
    put<std::uint32_t>(out, m.n);
    put<std::uint32_t>(out, m.d);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(m.source_tag.size()));
    out.insert(out.end(), m.source_tag.begin(), m.source_tag.end());
    for (const auto& id : m.sample_ids) {
        put<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
        out.insert(out.end(), id.begin(), id.end());
    }
    const auto* p = reinterpret_cast<const std::uint8_t*>(m.values.data());
    out.insert(out.end(), p, p + m.values.size() * sizeof(float));
    return out;
}

FeatureMatrix decode_matrix(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (r.string(4, "magic") != "FMX1") throw FormatError("bad magic");
    FeatureMatrix m;
    m.n = r.get<std::uint32_t>("n");
    m.d = r.get<std::uint32_t>("d");
    if (m.d == 0) throw FormatError("zero feature dimension");
    m.source_tag = r.string(r.get<std::uint16_t>("tag length"), "tag");
    m.sample_ids.reserve(std::min<std::size_t>(m.n, r.remaining() / 2));
    for (std::uint32_t i = 0; i < m.n; ++i) {
        const auto len = r.get<std::uint16_t>("id length");
        m.sample_ids.push_back(r.string(len, "sample id"));
    }
    const std::size_t count = static_cast<std::size_t>(m.n) * m.d;
    if (r.remaining() / sizeof(float) < count) throw FormatError("truncated file while reading values");
    if (r.remaining() != count * sizeof(float)) throw FormatError("trailing bytes after values");
    m.values.resize(count);
    std::memcpy(m.values.data(), r.cursor(), count * sizeof(float));
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw FormatError(e.what());
    }
    return m;
}

void write_matrix(const FeatureMatrix& m, const fs::path& path) {
    const auto bytes = encode_matrix(m);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename to " + path.string() + ": " + ec.message());
}

FeatureMatrix read_matrix(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_matrix(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

CsvImport import_csv(const fs::path& path, bool has_header, bool last_column_label, const std::string& source_tag) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    CsvImport result;
    FeatureMatrix& m = result.matrix;
    m.source_tag = source_tag;
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && has_header) continue;
        if (line.empty() || line == "\r") continue;
        const auto fields = csv::split_record(line);
        if (columns == 0) {
            columns = fields.size();
            if (columns < (last_column_label ? 2u : 1u)) {
                throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": too few columns");
            }
        } else if (fields.size() != columns) {
            throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                              std::to_string(columns) + " columns, found " + std::to_string(fields.size()));
        }
        const std::size_t feature_cols = last_column_label ? columns - 1 : columns;
        for (std::size_t c = 0; c < columns; ++c) {
            double v = 0.0;
            std::istringstream ss(fields[c]);
            ss >> v;
            if (ss.fail() || !(ss >> std::ws).eof()) {
                throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": not a number: '" +
                                  fields[c] + "'");
            }
            if (c < feature_cols) {
                m.values.push_back(static_cast<float>(v));
            } else {
                if (v != std::floor(v) || v < 0) {
                    throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                                      ": label column is not a non-negative integer");
                }
                labels.push_back(static_cast<int>(v));
            }
        }
        m.sample_ids.push_back(std::to_string(m.n));
        ++m.n;
    }
    if (m.n == 0) throw FormatError(path.string() + ": no data rows");
    m.d = static_cast<std::uint32_t>(last_column_label ? columns - 1 : columns);
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (last_column_label) result.labels = std::move(labels);
    return result;
}

void export_csv(const FeatureMatrix& m, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(9);  // round-trips binary32
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.d; ++j) {
            if (j) out << ',';
            out << m.at(i, j);
        }
        out << '\n';
    }
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace wastebench
