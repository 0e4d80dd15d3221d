// Copyright 2026 The rwl1 Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RWL1_DENSE_H_
#define RWL1_DENSE_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rwl1 {

using DenseVector = std::vector<double>;

// Row-major real matrix with finite entries.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }
  std::span<const double> entries() const { return entries_; }

  DenseVector multiply(std::span<const double> v) const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

double norm1(std::span<const double> v);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);

}  // namespace rwl1

#endif  // RWL1_DENSE_H_
