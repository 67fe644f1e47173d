#pragma once

#include <cmath>
#include <vector>

#include "cogload/encoder.hpp"

namespace oracle {

// Spike steps from the closed-form solution of the Euler recursion: starting
// at v_reset, V(t) = X + (v_reset - X) * (1 - dt/tau)^t, so the first step
// with V > v_th is the smallest integer t above ln((v_th - X)/(v_reset - X)) /
// ln(1 - dt/tau). After a spike the same solution restarts.
inline std::vector<int> closed_form_steps(double x, const cogload::LifEncoderParams& p) {
  const double X = p.v_rest + p.gain * x;
  std::vector<int> steps;
  if (X <= p.v_th) return steps;
  const double a = 1.0 - p.dt / p.tau;
  const double t_cross = std::log((p.v_th - X) / (p.v_reset - X)) / std::log(a);
  int gap = static_cast<int>(std::floor(t_cross)) + 1;
  // Guard the exact-hit case: V must strictly exceed v_th.
  if (X + (p.v_reset - X) * std::pow(a, gap - 1) > p.v_th) --gap;
  for (int t = gap; t < p.steps; t += gap) steps.push_back(t);
  return steps;
}

}  // namespace oracle
