#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evonids/common.hpp"

#include "json.hpp"

namespace evonids::nslkdd {

inline constexpr std::size_t kFeatureCount = 41;

// Column indices of the nominal features.
inline constexpr std::array<std::size_t, 3> kNominalColumns = {1, 2, 3};  // protocol_type, service, flag

const std::array<std::string, kFeatureCount>& feature_names();

enum class ClassLabel : int { Normal = 0, DoS = 1, Probe = 2, R2L = 3, U2R = 4 };
inline constexpr std::size_t kClassCount = 5;

const std::array<std::string, kClassCount>& class_names();
const std::string& class_name(ClassLabel label);
ClassLabel class_label_from_name(const std::string& name);  // throws on unknown

// Maps an attack name (trimmed, case-insensitive) to its category.
// Unknown names are hard errors so dataset drift surfaces immediately.
ClassLabel map_attack_to_class(std::string_view attack_name);

struct RawRecord {
    std::array<std::string, kFeatureCount> fields;
    std::string attack_name;
    // The distributed files carry a difficulty column; it is dropped here.
};

struct ParseReject {
    std::size_t line_number = 0;  // 1-based
    std::string reason;
};

struct ParseResult {
    std::vector<RawRecord> records;
    std::vector<ParseReject> rejects;
};

// Comma-separated NSL-KDD rows, 42 or 43 fields, no header. Blank lines are
// skipped. Throws on unreadable input or when more than 1% of non-blank lines
// are malformed (almost certainly the wrong file).
ParseResult parse_file(const std::string& path);
ParseResult parse_stream(std::istream& in, const std::string& origin = "<stream>");

struct EncoderState {
    // One category list per nominal column, in first-appearance order;
    // the category's position is its integer code.
    std::array<std::vector<std::string>, kNominalColumns.size()> categories;
    std::array<double, kFeatureCount> col_min{};
    std::array<double, kFeatureCount> col_max{};

    std::optional<int> encode_nominal(std::size_t nominal_slot, const std::string& value) const;

    nlohmann::json to_json() const;
    static EncoderState from_json(const nlohmann::json& j);
};

struct Dataset {
    FloatMatrix matrix;  // rows x feature count, all values in [0,1]
    std::vector<ClassLabel> labels5;
    std::vector<std::uint8_t> labels2;  // 0 = Normal, 1 = Attack
    std::vector<std::string> feature_names;
    EncoderState encoder;

    std::size_t rows() const { return matrix.rows(); }
    std::size_t num_features() const { return matrix.cols(); }
    std::array<std::size_t, kClassCount> class_counts() const;
    std::vector<int> labels5_ids() const;
    Dataset select_rows(std::span<const std::size_t> idx) const;
};

// First-appearance category enumeration plus per-column min/max, fitted on
// training records only.
EncoderState fit_encoders(std::span<const RawRecord> train_records);

struct TransformResult {
    Dataset dataset;
    std::size_t rejected_records = 0;
};

// Min-max scaling to [0,1] with clipping; constant columns map to 0; unseen
// nominal categories encode as -1 and therefore clip to 0. Records with
// unparseable cells are rejected and counted.
TransformResult transform(std::span<const RawRecord> records, const EncoderState& encoder);

// Seeded per-class shuffle; per-class train/test counts stay within one row
// of the exact ratio. A class with a single row lands in train with a warning
// on stderr.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double ratio, std::uint64_t seed);

struct BalanceTarget {
    std::optional<std::size_t> cap;
    std::optional<std::string> reference_class;

    // Parses either a positive integer or a class name.
    static BalanceTarget parse(const std::string& text);
};

// Downsamples every class above the cap to exactly the cap via seeded uniform
// sampling without replacement, then reshuffles row order.
Dataset balance_downsample(const Dataset& ds, const BalanceTarget& target, std::uint64_t seed);

// Deterministic CSV snapshot (header: feature names + class5).
void save_snapshot_csv(const Dataset& ds, const std::string& path);
Dataset load_snapshot_csv(const std::string& path);

// Shared helper: stratified index split over integer labels. Returns
// {train_indices, test_indices}; both sides are seeded-shuffled.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    std::span<const int> labels, double train_fraction, std::uint64_t seed, bool warn_small = true);

}  // namespace evonids::nslkdd
