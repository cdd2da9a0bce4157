#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mrpred/numerics.hpp"

namespace mrpred::svm {

struct Params {
    double c = 1.0;               // hinge penalty
    std::size_t max_iter = 1000;  // epochs
    double tol = 1e-4;            // max projected-gradient violation
    std::uint64_t seed = 0;       // epoch shuffling

    bool operator==(const Params&) const = default;
};

struct Model {
    std::vector<double> weights;
    double bias = 0.0;
    Params params;
    double final_objective = 0.0;          // primal value at the solution
    std::vector<double> objective_trace;   // dual objective after each epoch
};

// L2-regularized hinge-loss linear SVM via dual coordinate descent with
// seeded epoch shuffling. The bias is folded in as a constant-1 feature and
// regularized with the weights. Labels are {0, 1}; both classes must be
// present and all features finite.
Model fit(const numerics::DenseMatrix& x, std::span<const int> y, const Params& params);

double decision_value(const Model& model, std::span<const double> x);

// Class 1 iff w.x + b > 0; an exact 0 maps to class 0.
std::vector<int> predict(const Model& model, const numerics::DenseMatrix& x);

// Primal objective 0.5*(|w|^2 + b^2) + c * sum hinge at the given data.
double primal_objective(const Model& model, const numerics::DenseMatrix& x,
                        std::span<const int> y);

// Versioned, round-trippable text serialization (same container format as
// labelprop models).
void save(const Model& model, std::ostream& out);
Model load(std::istream& in);

}  // namespace mrpred::svm
