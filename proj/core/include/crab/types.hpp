#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace crab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A point of the symplectization cone Σ×ℝ_{>0}: a point x of Σ in the
/// model's ambient coordinates together with the radial coordinate r.
struct ConePoint {
  Vec x;
  double r = 1.0;
};

/// A point lies outside the coordinate chart of a model.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integrator or solver breakdown. The message carries diagnostics.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A contact Hamiltonian was found to be non-positive where positivity is required.
class PositivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested operation is not available for the given model or map.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace crab
