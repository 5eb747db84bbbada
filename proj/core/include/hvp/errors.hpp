#pragma once

#include <stdexcept>
#include <string>

namespace hvp {

/// Domain fails the strict star-shape requirement x.n >= L0 > 0.
struct NonStarShaped : std::runtime_error {
  explicit NonStarShaped(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter pack violates an admissibility constraint.
struct InvalidParams : std::invalid_argument {
  explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

/// No alpha satisfies 1/2 < alpha < nu/(2(nu-2)).
struct NoAdmissibleAlpha : std::invalid_argument {
  explicit NoAdmissibleAlpha(const std::string& what) : std::invalid_argument(what) {}
};

/// Mesh size does not divide the domain extents.
struct IncompatibleMesh : std::invalid_argument {
  explicit IncompatibleMesh(const std::string& what) : std::invalid_argument(what) {}
};

/// Linear solve missed its residual target.
struct SolveFailure : std::runtime_error {
  explicit SolveFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Ridge-regularised normal matrix is numerically singular.
struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

/// Training loss blew past the divergence guard.
struct Diverged : std::runtime_error {
  explicit Diverged(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed run configuration.
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace hvp
