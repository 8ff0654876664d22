#include "readlevel/matrix.hpp"

#include <algorithm>
#include <numeric>

#include "readlevel/error.hpp"

namespace readlevel {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw DataError("row width does not match matrix");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::hconcat(const Matrix& right) const {
  if (cols_ == 0) return right;
  if (right.cols_ == 0) return *this;
  if (right.rows_ != rows_) throw DataError("hconcat: row counts differ");
  Matrix out(rows_, cols_ + right.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto dst = out.row(r);
    std::copy(row(r).begin(), row(r).end(), dst.begin());
    std::copy(right.row(r).begin(), right.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(cols_));
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace readlevel
