#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace linmaml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Regime { Over, Under, General };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Over: return "overparameterized";
        case Regime::Under: return "underparameterized";
        case Regime::General: return "general";
    }
    return "?";
}

// Design matrix (near-)singular beyond the working condition bound; the
// affected run is discarded and redrawn.
struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// More than the allowed fraction of runs had to be discarded.
struct DiscardBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace linmaml
