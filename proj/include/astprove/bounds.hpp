#pragma once

#include "astprove/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace astprove::bounds {

// Which tail-bound family to evaluate: DiffBounded needs a finite step bound
// on the certificate and decays like 1/sqrt(k); General works without a step
// bound and decays like k^(-1/6) past a validity threshold.
enum class Kind { DiffBounded, General };

struct BoundInput {
  Rat e_x0;                   // expected starting level of the certificate
  Rat delta;                  // progress level of the certificate
  std::optional<Rat> c_diff;  // step bound (required for DiffBounded)
  Kind kind = Kind::DiffBounded;
};

struct BoundResult {
  long long k = 0;
  BigFloat bound;     // upper bound on P(T >= k); clamped to 1, rounded upward
  BigFloat t;         // evaluation point used (DiffBounded only)
  BigFloat c;         // exponent-remainder constant (General only)
  BigFloat C;         // leading coefficient (General only)
  BigFloat M;         // growth cutoff (General only)
  long long N = 0;    // burn-in index (General only)
  bool valid = true;  // General only: k clears the validity threshold
};

// Raised when a caller-chosen evaluation point t breaks the remainder
// control that the difference-bounded derivation needs.
class TViolatesSmallness : public std::runtime_error {
public:
  explicit TViolatesSmallness(const std::string& what) : std::runtime_error(what) {}
};

// Largest t > 0 keeping  exp(c t) - 1 - c t - (c t)^2/2  <=  (delta^2/4) t^2
// for the given step bound; found by bisection to ~1e-12 relative width.
BigFloat diff_t_max(const Rat& c_diff, const Rat& delta);

// P(T >= k) <= (1 - exp(-t E)) / (1 - (1 + (delta^2/4) t^2)^(-k)) at
// t = min(1/sqrt(k), diff_t_max) unless `t` is given explicitly; an explicit
// t outside the admissible range throws TViolatesSmallness.
BoundResult bound_diff(const BoundInput& in, long long k,
                       std::optional<BigFloat> t = std::nullopt);

// Step-bound-free tail bound C/sqrt(k) + E/M with M = (c^2 k)^(1/6); carries
// valid=false (and a clamped bound of 1) until M outgrows both E and N^(1/6).
BoundResult bound_general(const BoundInput& in, long long k);

// Evaluates the input's kind at each k (ks must be increasing); the resulting
// bounds are checked to be nonincreasing before returning.
std::vector<BoundResult> bound_series(const BoundInput& in,
                                      const std::vector<long long>& ks);

// "k,bound,method,t,valid" rows; method is "diff" or "general".
std::string bounds_csv(const std::vector<BoundResult>& series, Kind kind);

} // namespace astprove::bounds
