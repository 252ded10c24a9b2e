/*
 Copyright 2026 The mtsc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef MTSC_TERM_BUILDER_HPP
#define MTSC_TERM_BUILDER_HPP

#include <Eigen/Sparse>

#include <vector>

#include "mtsc/system_model.hpp"

namespace mtsc::detail {

/// Assembles one term matrix G (rows x dims) from dense blocks.
class TermBuilder {
public:
    TermBuilder(int rows, int dims) : rows_(rows), dims_(dims) {}

    TermBuilder& block(int col, const Mat& B) {
        for (Eigen::Index c = 0; c < B.cols(); ++c)
            for (Eigen::Index r = 0; r < B.rows(); ++r)
                if (B(r, c) != 0.0) trip_.emplace_back(static_cast<int>(r), col + static_cast<int>(c), B(r, c));
        return *this;
    }

    TermBuilder& identity(int col, double scale = 1.0) {
        for (int i = 0; i < rows_; ++i) trip_.emplace_back(i, col + i, scale);
        return *this;
    }

    Eigen::SparseMatrix<double> build() const {
        Eigen::SparseMatrix<double> G(rows_, dims_);
        G.setFromTriplets(trip_.begin(), trip_.end());
        G.makeCompressed();
        return G;
    }

private:
    int rows_;
    int dims_;
    std::vector<Eigen::Triplet<double>> trip_;
};

}  // namespace mtsc::detail

#endif  // MTSC_TERM_BUILDER_HPP
