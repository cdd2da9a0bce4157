#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mrpred::numerics {

// Dense row-major matrix of doubles.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        return {data_.data() + i * cols_, cols_};
    }

    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;

    bool operator==(const DenseMatrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Plain O(n^3) product; dimensions must agree.
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

// L2 norm of a - b; lengths must match.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Binary kNN affinity over the rows of `points`: W[i][j] = 1 iff j is among
// the k nearest rows to i by Euclidean distance (self excluded, distance ties
// broken by the lower row index). Not symmetrized; every row sums to k.
// Requires 0 < k < n.
DenseMatrix knn_weights(const DenseMatrix& points, std::size_t k);

// Gaussian affinity W[i][j] = exp(-gamma * d(i,j)^2) with zero diagonal.
// Symmetric; entries in [0, 1]. Requires gamma > 0.
DenseMatrix rbf_weights(const DenseMatrix& points, double gamma);

struct TTestResult {
    double t_statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
    // Zero variance with nonzero mean difference: t is +/-infinity, p is 0.
    bool degenerate = false;
};

// Two-tailed paired t-test on matched samples (sample sd, n-1 denominator).
// Identical samples give t = 0, p = 1. Requires equal lengths >= 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta function I_x(a, b) by continued fraction
// (Lentz), converged to 1e-12.
double incomplete_beta(double a, double b, double x);

}  // namespace mrpred::numerics
