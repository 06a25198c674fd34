#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mpemba {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Parameters outside the physical domain (negative temperature, p0 > 1, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that is well-posed but failed numerically (degenerate
/// spectrum, divergent Fisher information, unstable integration).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw DomainError(message);
    }
}

} // namespace detail

} // namespace mpemba
