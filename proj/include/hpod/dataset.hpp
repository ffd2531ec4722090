#pragma once

#include "hpod/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hpod {

struct Dataset {
    std::string name;
    Matrix X;                          // n rows x d feature columns
    std::optional<Eigen::VectorXi> y;  // binary labels, 1 = outlier
    std::string source;
    int dropped_rows = 0;  // rows removed by the NaN filter at load time

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index dims() const { return X.cols(); }
    bool labeled() const { return y.has_value(); }
};

struct Corpus {
    std::vector<Dataset> datasets;  // all labeled, unique names, ordered by name
};

// Reads a header-bearing CSV. All non-label columns must be numeric; rows with
// NaN in any feature are dropped (count kept on the Dataset). Labels must be
// integer 0/1.
Dataset load_dataset(const std::string& path,
                     const std::optional<std::string>& label_column);

// Per-column z-scoring with population (1/n) std; zero-variance columns map to
// all-zeros. Labels untouched, row order preserved.
Dataset standardize(const Dataset& ds);
Matrix standardize_matrix(const Matrix& X);

// Loads every *.csv in a directory as a labeled dataset; final order is by name.
Corpus load_corpus(const std::string& dir, const std::string& label_column);

}  // namespace hpod
