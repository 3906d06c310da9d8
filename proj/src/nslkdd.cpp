#include "evonids/nslkdd.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace evonids::nslkdd {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

const std::unordered_map<std::string, ClassLabel>& attack_taxonomy() {
    static const std::unordered_map<std::string, ClassLabel> table = {
        {"normal", ClassLabel::Normal},
        // DoS
        {"back", ClassLabel::DoS},
        {"land", ClassLabel::DoS},
        {"neptune", ClassLabel::DoS},
        {"pod", ClassLabel::DoS},
        {"smurf", ClassLabel::DoS},
        {"teardrop", ClassLabel::DoS},
        {"mailbomb", ClassLabel::DoS},
        {"processtable", ClassLabel::DoS},
        {"udpstorm", ClassLabel::DoS},
        {"apache2", ClassLabel::DoS},
        {"worm", ClassLabel::DoS},
        // Probe
        {"satan", ClassLabel::Probe},
        {"ipsweep", ClassLabel::Probe},
        {"nmap", ClassLabel::Probe},
        {"portsweep", ClassLabel::Probe},
        {"mscan", ClassLabel::Probe},
        {"saint", ClassLabel::Probe},
        // R2L
        {"guess_passwd", ClassLabel::R2L},
        {"guess_password", ClassLabel::R2L},
        {"ftp_write", ClassLabel::R2L},
        {"imap", ClassLabel::R2L},
        {"phf", ClassLabel::R2L},
        {"multihop", ClassLabel::R2L},
        {"warezmaster", ClassLabel::R2L},
        {"warezclient", ClassLabel::R2L},
        {"spy", ClassLabel::R2L},
        {"xlock", ClassLabel::R2L},
        {"xsnoop", ClassLabel::R2L},
        {"snmpguess", ClassLabel::R2L},
        {"snmpgetattack", ClassLabel::R2L},
        {"httptunnel", ClassLabel::R2L},
        {"sendmail", ClassLabel::R2L},
        {"named", ClassLabel::R2L},
        // U2R
        {"buffer_overflow", ClassLabel::U2R},
        {"loadmodule", ClassLabel::U2R},
        {"rootkit", ClassLabel::U2R},
        {"perl", ClassLabel::U2R},
        {"sqlattack", ClassLabel::U2R},
        {"xterm", ClassLabel::U2R},
        {"ps", ClassLabel::U2R},
    };
    return table;
}

std::optional<std::size_t> nominal_slot_of(std::size_t column) {
    for (std::size_t s = 0; s < kNominalColumns.size(); ++s)
        if (kNominalColumns[s] == column) return s;
    return std::nullopt;
}

std::optional<double> parse_numeric(const std::string& text) {
    const std::string_view t = trim(text);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "duration",
        "protocol_type",
        "service",
        "flag",
        "src_bytes",
        "dst_bytes",
        "land",
        "wrong_fragment",
        "urgent",
        "hot",
        "num_failed_logins",
        "logged_in",
        "num_compromised",
        "root_shell",
        "su_attempted",
        "num_root",
        "num_file_creations",
        "num_shells",
        "num_access_files",
        "num_outbound_cmds",
        "is_host_login",
        "is_guest_login",
        "count",
        "srv_count",
        "serror_rate",
        "srv_serror_rate",
        "rerror_rate",
        "srv_rerror_rate",
        "same_srv_rate",
        "diff_srv_rate",
        "srv_diff_host_rate",
        "dst_host_count",
        "dst_host_srv_count",
        "dst_host_same_srv_rate",
        "dst_host_diff_srv_rate",
        "dst_host_same_src_port_rate",
        "dst_host_srv_diff_host_rate",
        "dst_host_serror_rate",
        "dst_host_srv_serror_rate",
        "dst_host_rerror_rate",
        "dst_host_srv_rerror_rate",
    };
    return names;
}

const std::array<std::string, kClassCount>& class_names() {
    static const std::array<std::string, kClassCount> names = {"Normal", "DoS", "Probe", "R2L", "U2R"};
    return names;
}

const std::string& class_name(ClassLabel label) {
    return class_names().at(static_cast<std::size_t>(label));
}

ClassLabel class_label_from_name(const std::string& name) {
    const auto& names = class_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<ClassLabel>(static_cast<int>(i));
    throw std::invalid_argument("unknown class name: " + name);
}

ClassLabel map_attack_to_class(std::string_view attack_name) {
    const std::string key = to_lower(trim(attack_name));
    const auto& table = attack_taxonomy();
    auto it = table.find(key);
    if (it == table.end())
        throw std::invalid_argument("unknown attack name: '" + std::string(attack_name) + "'");
    return it->second;
}

ParseResult parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return parse_stream(in, path);
}

ParseResult parse_stream(std::istream& in, const std::string& origin) {
    ParseResult result;
    std::string line;
    std::size_t line_number = 0;
    std::size_t non_blank = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++non_blank;
        auto fields = split_csv_line(line);
        if (fields.size() != kFeatureCount + 1 && fields.size() != kFeatureCount + 2) {
            result.rejects.push_back(
                {line_number, strf("expected %zu or %zu fields, got %zu", kFeatureCount + 1,
                                   kFeatureCount + 2, fields.size())});
            continue;
        }
        const std::string_view attack = trim(fields[kFeatureCount]);
        if (attack.empty()) {
            result.rejects.push_back({line_number, "empty attack-name field"});
            continue;
        }
        RawRecord rec;
        for (std::size_t i = 0; i < kFeatureCount; ++i) rec.fields[i] = std::move(fields[i]);
        rec.attack_name = std::string(attack);
        result.records.push_back(std::move(rec));
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading: " + origin);
    if (non_blank > 0 && result.rejects.size() * 100 > non_blank) {
        throw std::runtime_error(strf("%s: %zu of %zu non-blank lines malformed (>1%%); wrong file?",
                                      origin.c_str(), result.rejects.size(), non_blank));
    }
    return result;
}

std::optional<int> EncoderState::encode_nominal(std::size_t nominal_slot, const std::string& value) const {
    const auto& cats = categories.at(nominal_slot);
    auto it = std::find(cats.begin(), cats.end(), value);
    if (it == cats.end()) return std::nullopt;
    return static_cast<int>(it - cats.begin());
}

nlohmann::json EncoderState::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    nlohmann::json cats = nlohmann::json::object();
    for (std::size_t s = 0; s < kNominalColumns.size(); ++s)
        cats[feature_names()[kNominalColumns[s]]] = categories[s];
    j["categories"] = std::move(cats);
    j["col_min"] = col_min;
    j["col_max"] = col_max;
    return j;
}

EncoderState EncoderState::from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) throw std::runtime_error("unsupported encoder version");
    EncoderState state;
    const auto& cats = j.at("categories");
    for (std::size_t s = 0; s < kNominalColumns.size(); ++s)
        state.categories[s] = cats.at(feature_names()[kNominalColumns[s]]).get<std::vector<std::string>>();
    auto mins = j.at("col_min").get<std::vector<double>>();
    auto maxs = j.at("col_max").get<std::vector<double>>();
    if (mins.size() != kFeatureCount || maxs.size() != kFeatureCount)
        throw std::runtime_error("encoder min/max length mismatch");
    std::copy(mins.begin(), mins.end(), state.col_min.begin());
    std::copy(maxs.begin(), maxs.end(), state.col_max.begin());
    return state;
}

std::array<std::size_t, kClassCount> Dataset::class_counts() const {
    std::array<std::size_t, kClassCount> counts{};
    for (ClassLabel l : labels5) ++counts[static_cast<std::size_t>(l)];
    return counts;
}

std::vector<int> Dataset::labels5_ids() const {
    std::vector<int> ids(labels5.size());
    std::transform(labels5.begin(), labels5.end(), ids.begin(),
                   [](ClassLabel l) { return static_cast<int>(l); });
    return ids;
}

Dataset Dataset::select_rows(std::span<const std::size_t> idx) const {
    Dataset out;
    out.matrix = matrix.select_rows(idx);
    out.labels5.reserve(idx.size());
    out.labels2.reserve(idx.size());
    for (std::size_t i : idx) {
        out.labels5.push_back(labels5.at(i));
        out.labels2.push_back(labels2.at(i));
    }
    out.feature_names = feature_names;
    out.encoder = encoder;
    return out;
}

EncoderState fit_encoders(std::span<const RawRecord> train_records) {
    if (train_records.empty()) throw std::invalid_argument("fit_encoders: no records");
    EncoderState state;
    std::array<std::map<std::string, int>, kNominalColumns.size()> seen;
    for (const RawRecord& rec : train_records) {
        for (std::size_t s = 0; s < kNominalColumns.size(); ++s) {
            const std::string& value = rec.fields[kNominalColumns[s]];
            if (seen[s].emplace(value, 0).second) state.categories[s].push_back(value);
        }
    }
    state.col_min.fill(std::numeric_limits<double>::infinity());
    state.col_max.fill(-std::numeric_limits<double>::infinity());
    std::size_t usable = 0;
    for (const RawRecord& rec : train_records) {
        std::array<double, kFeatureCount> row;
        bool ok = true;
        for (std::size_t c = 0; c < kFeatureCount && ok; ++c) {
            if (auto slot = nominal_slot_of(c)) {
                auto code = state.encode_nominal(*slot, rec.fields[c]);
                row[c] = code ? static_cast<double>(*code) : -1.0;
            } else if (auto v = parse_numeric(rec.fields[c])) {
                row[c] = *v;
            } else {
                ok = false;
            }
        }
        if (!ok) continue;
        ++usable;
        for (std::size_t c = 0; c < kFeatureCount; ++c) {
            state.col_min[c] = std::min(state.col_min[c], row[c]);
            state.col_max[c] = std::max(state.col_max[c], row[c]);
        }
    }
    if (usable == 0) throw std::runtime_error("fit_encoders: no numerically usable records");
    return state;
}

TransformResult transform(std::span<const RawRecord> records, const EncoderState& encoder) {
    TransformResult out;
    Dataset& ds = out.dataset;
    ds.feature_names.assign(feature_names().begin(), feature_names().end());
    ds.encoder = encoder;
    std::vector<double> data;
    data.reserve(records.size() * kFeatureCount);
    for (const RawRecord& rec : records) {
        std::array<double, kFeatureCount> row;
        bool ok = true;
        ClassLabel label{};
        try {
            label = map_attack_to_class(rec.attack_name);
        } catch (const std::invalid_argument&) {
            throw;  // unknown attack names are a hard error, not a reject
        }
        for (std::size_t c = 0; c < kFeatureCount && ok; ++c) {
            if (auto slot = nominal_slot_of(c)) {
                auto code = encoder.encode_nominal(*slot, rec.fields[c]);
                row[c] = code ? static_cast<double>(*code) : -1.0;  // unseen category; clips to 0
            } else if (auto v = parse_numeric(rec.fields[c])) {
                row[c] = *v;
            } else {
                ok = false;
            }
        }
        if (!ok) {
            ++out.rejected_records;
            continue;
        }
        for (std::size_t c = 0; c < kFeatureCount; ++c) {
            const double lo = encoder.col_min[c];
            const double hi = encoder.col_max[c];
            double scaled = 0.0;
            if (hi > lo) scaled = std::clamp((row[c] - lo) / (hi - lo), 0.0, 1.0);
            data.push_back(scaled);
        }
        ds.labels5.push_back(label);
        ds.labels2.push_back(label == ClassLabel::Normal ? 0 : 1);
    }
    ds.matrix = FloatMatrix(ds.labels5.size(), kFeatureCount, std::move(data));
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    std::span<const int> labels, double train_fraction, std::uint64_t seed, bool warn_small) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must be in (0, 1)");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    auto rng = seeded_rng(seed);
    std::vector<std::size_t> train, test;
    for (auto& [cls, idx] : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        if (idx.size() == 1) {
            if (warn_small)
                std::cerr << "warning: class " << cls << " has a single row; keeping it in train\n";
            train.push_back(idx[0]);
            continue;
        }
        auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::shuffle(train.begin(), train.end(), rng);
    std::shuffle(test.begin(), test.end(), rng);
    return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double ratio, std::uint64_t seed) {
    const auto ids = ds.labels5_ids();
    auto [train_idx, test_idx] = stratified_split_indices(ids, ratio, seed);
    return {ds.select_rows(train_idx), ds.select_rows(test_idx)};
}

BalanceTarget BalanceTarget::parse(const std::string& text) {
    const std::string t(trim(text));
    if (t.empty()) throw std::invalid_argument("empty balance target");
    if (std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) {
        BalanceTarget target;
        target.cap = static_cast<std::size_t>(std::stoull(t));
        if (*target.cap == 0) throw std::invalid_argument("balance cap must be positive");
        return target;
    }
    class_label_from_name(t);  // validates; throws on unknown
    BalanceTarget target;
    target.reference_class = t;
    return target;
}

Dataset balance_downsample(const Dataset& ds, const BalanceTarget& target, std::uint64_t seed) {
    if (!target.cap && !target.reference_class)
        throw std::invalid_argument("balance target must set a cap or a reference class");
    const auto counts = ds.class_counts();
    std::size_t cap = 0;
    if (target.cap) {
        cap = *target.cap;
    } else {
        const auto ref = class_label_from_name(*target.reference_class);
        cap = counts[static_cast<std::size_t>(ref)];
        if (cap == 0)
            throw std::invalid_argument("reference class " + *target.reference_class +
                                        " has no rows; cannot balance against it");
    }
    std::array<std::vector<std::size_t>, kClassCount> by_class;
    for (std::size_t i = 0; i < ds.labels5.size(); ++i)
        by_class[static_cast<std::size_t>(ds.labels5[i])].push_back(i);
    auto rng = seeded_rng(seed);
    std::vector<std::size_t> kept;
    for (auto& idx : by_class) {
        if (idx.size() > cap) {
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(cap);
            std::sort(idx.begin(), idx.end());
        }
        kept.insert(kept.end(), idx.begin(), idx.end());
    }
    std::shuffle(kept.begin(), kept.end(), rng);
    return ds.select_rows(kept);
}

void save_snapshot_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write snapshot: " + path);
    for (std::size_t c = 0; c < ds.feature_names.size(); ++c) {
        if (c) out << ',';
        out << ds.feature_names[c];
    }
    out << ",class5\n";
    char buf[32];
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        auto row = ds.matrix.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            // shortest representation that parses back to the same double
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), row[c]);
            out.write(buf, ptr - buf);
            (void)ec;
        }
        out << ',' << class_name(ds.labels5[r]) << '\n';
    }
    if (!out) throw std::runtime_error("I/O error while writing snapshot: " + path);
}

Dataset load_snapshot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty snapshot: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv_line(line);
    if (header.size() < 2 || header.back() != "class5")
        throw std::runtime_error("snapshot header must end with class5: " + path);
    Dataset ds;
    ds.feature_names.assign(header.begin(), header.end() - 1);
    const std::size_t n_features = ds.feature_names.size();
    std::vector<double> data;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != n_features + 1)
            throw std::runtime_error(
                strf("%s:%zu: expected %zu fields, got %zu", path.c_str(), line_number,
                     n_features + 1, fields.size()));
        for (std::size_t c = 0; c < n_features; ++c) {
            auto v = parse_numeric(fields[c]);
            if (!v)
                throw std::runtime_error(
                    strf("%s:%zu: bad numeric value '%s'", path.c_str(), line_number,
                         fields[c].c_str()));
            data.push_back(*v);
        }
        const ClassLabel label = class_label_from_name(std::string(trim(fields[n_features])));
        ds.labels5.push_back(label);
        ds.labels2.push_back(label == ClassLabel::Normal ? 0 : 1);
    }
    ds.matrix = FloatMatrix(ds.labels5.size(), n_features, std::move(data));
    return ds;
}

}  // namespace evonids::nslkdd
