#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evonids {

// Dense row-major matrix of doubles. All dataset and classifier code works on
// this instead of vector<vector<double>> so rows stay contiguous.
class FloatMatrix {
public:
    FloatMatrix() = default;
    FloatMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    FloatMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument("FloatMatrix: data size does not match rows*cols");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) {
        return {data_.data() + r * cols_, cols_};
    }

    const std::vector<double>& raw() const { return data_; }
    std::vector<double>& raw() { return data_; }

    FloatMatrix select_rows(std::span<const std::size_t> idx) const {
        FloatMatrix out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] >= rows_) throw std::out_of_range("FloatMatrix::select_rows: row index out of range");
            auto src = row(idx[i]);
            auto dst = out.row(i);
            std::copy(src.begin(), src.end(), dst.begin());
        }
        return out;
    }

    FloatMatrix select_columns(std::span<const std::size_t> idx) const {
        FloatMatrix out(rows_, idx.size());
        for (std::size_t c = 0; c < idx.size(); ++c) {
            if (idx[c] >= cols_) throw std::out_of_range("FloatMatrix::select_columns: column index out of range");
        }
        for (std::size_t r = 0; r < rows_; ++r) {
            auto src = row(r);
            auto dst = out.row(r);
            for (std::size_t c = 0; c < idx.size(); ++c) dst[c] = src[idx[c]];
        }
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// printf-style formatting into std::string (libstdc++ 11 lacks std::format).
std::string strf(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

// Rounds to a fixed number of decimals so a value printed with %.*f parses
// back to the identical double. Reports rely on this for md/json equality.
double round_decimals(double v, int decimals);

}  // namespace evonids
