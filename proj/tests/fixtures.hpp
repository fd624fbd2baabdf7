#pragma once

#include "crackdyn/diagnostics.hpp"

namespace fixtures {

/// Cracked 2 x 1 strip, clamped at both ends, released from a state that
/// squeezes the material toward the crack and shears it slightly. The faces
/// collide within the first half period and slide against a small Tresca
/// threshold.
inline crackdyn::Scenario impact(double gamma = 0.0, double epsilon = 1e-2) {
  crackdyn::Scenario sc;
  sc.mesh = crackdyn::generate_rect_crack(2.0, 1.0, 16, 8, {0.25, 0.75});
  sc.material = {1.0, 1.0, 1.0};
  sc.contact.gamma = gamma;
  sc.contact.epsilon = epsilon;
  sc.contact.g = crackdyn::Expr::constant(0.02);
  sc.data.u0 = crackdyn::parse_vector(
      "(0.05*sin(pi*x/2)*(y-0.5), -0.05*sin(pi*x/2)*(y-0.5))");
  sc.time.t_end = 2.0;
  sc.time.dt = 0.01;
  return sc;
}

}  // namespace fixtures
