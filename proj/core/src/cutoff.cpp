#include "rotflow/cutoff.hpp"

#include <cmath>

namespace rotflow {

Jet1 cutoff_eval(double t) {
  const double u = std::fabs(t);
  if (u <= 1.0) return {1.0, 0.0, 0.0, 0.0};
  if (u >= 2.0) return {0.0, 0.0, 0.0, 0.0};

  const double a = u - 1.0;
  const double b = 2.0 - u;
  const double q = 1.0 / b - 1.0 / a;
  // exp(-|q|) underflows to zero beyond this point: the plateau values are exact.
  if (q < -745.0) return {1.0, 0.0, 0.0, 0.0};
  if (q > 745.0) return {0.0, 0.0, 0.0, 0.0};

  const double e = std::exp(-std::fabs(q));
  const double f = q > 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
  // f(1-f), computed without cancellation.
  const double g = e / ((1.0 + e) * (1.0 + e));

  const double fq = -g;
  const double fqq = g * (1.0 - 2.0 * f);
  const double fqqq = -g * (1.0 - 6.0 * f + 6.0 * f * f);

  const double ia = 1.0 / a;
  const double ib = 1.0 / b;
  const double q1 = ia * ia + ib * ib;
  const double q2 = -2.0 * ia * ia * ia + 2.0 * ib * ib * ib;
  const double q3 = 6.0 * (ia * ia * ia * ia + ib * ib * ib * ib);

  Jet1 out;
  out.value = f;
  out.d1 = fq * q1;
  out.d2 = fqq * q1 * q1 + fq * q2;
  out.d3 = fqqq * q1 * q1 * q1 + 3.0 * fqq * q1 * q2 + fq * q3;
  if (t < 0.0) {
    out.d1 = -out.d1;
    out.d3 = -out.d3;
  }
  return out;
}

} // namespace rotflow
