#pragma once

#include <map>
#include <optional>

#include "obstacle/data.hpp"
#include "obstacle/mesh.hpp"

namespace obstacle {

enum class ProblemKind { membrane, plate };

struct Example {
  std::string id;
  std::vector<std::string> aliases;
  ProblemKind kind = ProblemKind::membrane;
  Domain domain = Domain::unit_square;
  ScalarData f, g;
  std::optional<ScalarData> u_exact;
  std::optional<ScalarData> lambda_exact;
  int initial_refinements = 1;
  std::string description;
};

// Name -> example; built-ins are registered on first use, user problems can be
// added at runtime (plugin table of the CLI).
class ExampleRegistry {
 public:
  static ExampleRegistry& instance();
  void add(Example e);
  const Example& find(const std::string& name) const;  // throws Error
  bool contains(const std::string& name) const;
  std::vector<std::string> ids() const;

 private:
  ExampleRegistry();
  std::map<std::string, Example> by_id_;
  std::map<std::string, std::string> alias_;
};

// Cubic blend of the smooth membrane example: value 1/4 and slope 0 at x = 1/2,
// value and slope 0 at x = 1. Coefficients a0..a3 of sum a_k x^k.
std::array<double, 4> membrane_blend_coefficients();

Example membrane_smooth_example();
Example membrane_pyramid_example();
Example plate_smooth_example();
Example plate_ellipse_example();
Example plate_nonsmooth_example();

}  // namespace obstacle
