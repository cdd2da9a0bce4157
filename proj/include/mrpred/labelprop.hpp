#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mrpred/numerics.hpp"

namespace mrpred::labelprop {

enum class Kernel { kKnn, kRbf };

std::string_view kernel_name(Kernel k);
Kernel kernel_from_name(std::string_view name);

struct Params {
    Kernel kernel = Kernel::kKnn;
    std::size_t n_neighbors = 3;  // knn only
    double gamma = 20.0;          // rbf only
    std::size_t max_iter = 1;
    double tol = 1e-10;

    bool operator==(const Params&) const = default;
};

// Trained state: stacked training points (labeled rows first, order
// preserved), per-row binary label distributions (each row sums to 1,
// labeled rows exactly one-hot), and the iteration outcome.
struct Model {
    numerics::DenseMatrix training_points;
    numerics::DenseMatrix label_distributions;  // n x 2
    std::vector<bool> labeled_mask;
    Params params;
    std::size_t iterations_run = 0;
    bool converged = false;
};

// Column-normalizes a non-negative square affinity matrix; all-zero columns
// become uniform (1/n).
numerics::DenseMatrix build_transition(const numerics::DenseMatrix& weights);

// Iterates propagate (Y <- T*Y), row-normalize, clamp until the max absolute
// entrywise change falls below tol or max_iter iterations elapse. Unlabeled
// rows start uniform (0.5, 0.5). Requires at least one labeled point and at
// least 2 points in total.
Model fit(const numerics::DenseMatrix& x_labeled, std::span<const int> y_labeled,
          const numerics::DenseMatrix& x_unlabeled, const Params& params);

// Inductive rule: kernel-weighted vote over the training label distributions,
// argmax with ties toward class 0. Rows whose weights are all zero get class 0
// and increment *zero_weight_count when provided.
std::vector<int> predict(const Model& model, const numerics::DenseMatrix& x_test,
                         std::size_t* zero_weight_count = nullptr);

// argmax per training row, ties toward class 0.
std::vector<int> transductive_labels(const Model& model);

// Versioned, round-trippable text serialization.
void save(const Model& model, std::ostream& out);
Model load(std::istream& in);

}  // namespace mrpred::labelprop
