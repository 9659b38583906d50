#pragma once

namespace rotflow {

/// Value and first three derivatives of a scalar function of one variable.
struct Jet1 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Smooth plateau cutoff: 1 on |t| <= 1, 0 on |t| >= 2, C-infinity in between.
///
/// Realized as chi(t) = h(2-|t|) / (h(2-|t|) + h(|t|-1)) with h(s) = exp(-1/s)
/// for s > 0 and 0 otherwise. Evaluated in the equivalent logistic form
/// 1 / (1 + exp(q)) with q = 1/(2-|t|) - 1/(|t|-1), which avoids 0/0.
Jet1 cutoff_eval(double t);

} // namespace rotflow
