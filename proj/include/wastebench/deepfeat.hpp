#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wastebench {

/// n x d row-major single-precision features with provenance.
struct FeatureMatrix {
    std::uint32_t n = 0;
    std::uint32_t d = 0;
    std::vector<float> values;
    std::string source_tag;
    std::vector<std::string> sample_ids;

    float at(std::size_t row, std::size_t col) const { return values[row * d + col]; }
    const float* row(std::size_t r) const { return values.data() + r * d; }

    /// Throws ValidationError when an invariant is violated.
    void validate() const;
    bool operator==(const FeatureMatrix&) const = default;
};

/// "FMX1" binary codec: magic, u32 n, u32 d, u16 tag_len + tag, n x (u16 id_len + id),
/// n*d f32, all little-endian. Writes go through a temporary file and a rename.
void write_matrix(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix read_matrix(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_matrix(const FeatureMatrix& m);
FeatureMatrix decode_matrix(const std::vector<std::uint8_t>& bytes);

struct CsvImport {
    FeatureMatrix matrix;
    std::optional<std::vector<int>> labels;
};

/// Numeric CSV import. With `last_column_label`, the last column must be
/// integer-valued and becomes the label vector.
CsvImport import_csv(const std::filesystem::path& path, bool has_header, bool last_column_label = false,
                     const std::string& source_tag = "csv");

void export_csv(const FeatureMatrix& m, const std::filesystem::path& path);

}  // namespace wastebench
