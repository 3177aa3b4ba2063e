#pragma once

#include "astprove/certificates.hpp"

#include <stdexcept>
#include <string>
#include <variant>

namespace astprove::synth {

// Returned when no certificate of the searched shape exists or the search
// cannot run symbolically; `reason` names the obstacle.
struct NotFound {
  std::string reason;
};

// The supermartingale search enumerates sign patterns over the joint sampling
// support, which is exponential in the support size; past this cap the search
// is refused outright rather than silently stalling.
class SupportTooLarge : public std::runtime_error {
public:
  static constexpr std::size_t kMaxSupport = 12;

  explicit SupportTooLarge(std::size_t points)
      : std::runtime_error("joint sampling support has " + std::to_string(points) +
                           " points; the sign-pattern search caps at " +
                           std::to_string(kMaxSupport)),
        points(points) {}

  std::size_t points;
};

using SmapResult = std::variant<cert::SupermartingaleMap, NotFound>;
using LpfResult = std::variant<cert::LinearProgressFunction, NotFound>;

// Searches for an affine supermartingale map h = a·pv + c with delta = 1 and
// minimal L1 weight, then derives the smallest step bound zeta the exact
// one-step analysis supports (left absent when exit values are unbounded).
// Requires an increment-matrix body (throws NotIncremental otherwise); needs
// finite sampling support and an affine guard, else NotFound.  Every returned
// certificate has been re-checked symbolically.
SmapResult synth_smap_linear(const lang::SingleWhileLoop& loop);

// Searches for a linear progress function a·pv + c that is positive on the
// guard region, has nonpositive mean one-step change, and strictly positive
// one-step variance.  Requires an increment-matrix body (throws NotIncremental
// otherwise); an affine guard, else NotFound.  Re-checked before returning.
LpfResult synth_lpf(const lang::SingleWhileLoop& loop);

// Same search without the guard-positivity constraint: drift and variance
// only, c fixed to zero.  Callers must establish positivity themselves (for
// instance on a box after shifting c); the result is NOT pre-validated.
LpfResult synth_lpf_drift_only(const lang::SingleWhileLoop& loop);

} // namespace astprove::synth
