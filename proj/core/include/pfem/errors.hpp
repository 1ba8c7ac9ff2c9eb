#ifndef PFEM_ERRORS_HPP_
#define PFEM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pfem {

/// Invalid argument: exponent out of range, negative degree, too few nodes...
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A weighted integral that does not converge (weight exponent <= -1).
class IntegrabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A function handed to a constructor violates a stated precondition
/// (e.g. an edge polynomial that does not vanish at the edge endpoints).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mesh validation failures. `element()` is -1 when no element is involved.
class MeshError : public std::runtime_error {
 public:
  MeshError(const std::string& what, int element = -1)
      : std::runtime_error(what), element_(element) {}
  int element() const noexcept { return element_; }

 private:
  int element_;
};

class GeometryError : public MeshError {
 public:
  using MeshError::MeshError;
};

class ConformityError : public MeshError {
 public:
  using MeshError::MeshError;
};

class OrientationError : public MeshError {
 public:
  using MeshError::MeshError;
};

/// Interpolation needs p_V - 1 >= 1 at every vertex.
class DegreeFloorError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// The assembled system is not SPD or the solve missed its residual target.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero error paired with a non-zero estimator (or vice versa).
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad run configuration or input document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pfem

#endif  // PFEM_ERRORS_HPP_
