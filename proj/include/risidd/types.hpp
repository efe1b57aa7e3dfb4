#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace risidd {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using cd = std::complex<double>;

/// Symmetric saturation applied to every LLR crossing a module boundary
/// (detector <-> decoder). Keeps exp/tanh in a numerically safe range.
inline constexpr double kLlrMax = 50.0;

/// Thrown when an input violates a documented precondition (bad dimensions,
/// non-finite values, inconsistent parameters).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerically required operation cannot be completed
/// (singular system with no consistent solution, code construction jam).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}

}  // namespace risidd
