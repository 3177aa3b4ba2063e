#pragma once

#include "astprove/lincons.hpp"
#include "astprove/normalize.hpp"

#include <optional>
#include <variant>

namespace astprove::cert {

// Candidate ranking expression over program variables with exact rational
// coefficients: sum a_i*x_i + sum s_i*isqrt(x_i) + c.
struct CertExpr {
  std::vector<Rat> a; // per program variable
  std::vector<Rat> s; // isqrt coefficients, per program variable
  Rat c;

  explicit CertExpr(std::size_t n_pvars = 0)
      : a(n_pvars, Rat(0)), s(n_pvars, Rat(0)), c(0) {}
  Rat eval(std::span<const long long> pv) const;
  bool affine() const; // no isqrt contribution
  std::string to_string(const std::vector<std::string>& pvars) const;
};

// Parses e.g. "x + 1", "-x + y + 1/4", "x + 2*isqrt(y) - 3/2".
CertExpr parse_cert_expr(const std::string& text,
                         const std::vector<std::string>& pvars);

// Ranking certificate: value of the candidate inside the loop (outside it is
// identically zero), the minimum level delta > 0 it keeps while the loop
// runs, and an optional almost-sure step bound zeta.
struct SupermartingaleMap {
  CertExpr h;
  Rat delta = 1;
  std::optional<Rat> zeta;
};

// Affine candidate a^T pv + c whose per-iteration increment must have
// nonpositive mean and positive variance.
struct LinearProgressFunction {
  std::vector<Rat> a;
  Rat c;
};

enum class Verdict { Certified, CertifiedOnBox, Refuted, Inconclusive };
enum class CheckMode { Symbolic, Box, Statistical };

struct ConditionStatus {
  std::string name; // "D1", "D2i", "D2ii", "D3.1", "D3.2", "D4" / "L1".."L3"
  bool holds = false;
  std::string note;
};

struct Witness {
  std::string condition;
  std::vector<long long> pv, rv; // empty for global (moment) conditions
  std::string detail;            // exact values involved, for the record
};

struct CheckReport {
  Verdict verdict = Verdict::Inconclusive;
  CheckMode mode = CheckMode::Symbolic;
  std::vector<ConditionStatus> conditions;
  std::optional<Witness> witness; // present exactly when refuted
  std::string reason;             // inconclusive cause / fallback notices
};

// Inclusive integer ranges per program variable for bounded checking.
struct Box {
  std::vector<std::pair<long long, long long>> range;
};

class NotIncremental : public std::runtime_error {
public:
  NotIncremental()
      : std::runtime_error("loop body is not a pure increment update "
                           "pv' = pv + A*rv, which this analysis requires") {}
};

// Splits an affine guard into a union of conjunctive polyhedra (one per
// disjunct of its disjunctive normal form).  Returns nullopt when any atom
// is nonlinear or the normal form grows too large.
std::optional<std::vector<lincons::Polyhedron>> guard_polyhedra(const lang::Guard& g,
                                                                std::size_t arity);

// Checks the full condition set for a supermartingale-map candidate.
// Symbolic mode covers affine h over affine guards (disjunctions included)
// with an increment-matrix body; anything else falls back to the box when one
// is given (verdict downgraded to CertifiedOnBox) and is inconclusive otherwise.
CheckReport check_smap(const lang::SingleWhileLoop& loop,
                       const SupermartingaleMap& cand,
                       const std::optional<Box>& box = std::nullopt);

// Checks guard-positivity and the drift/variance conditions for a linear
// progress function.  Requires an increment-matrix body.
CheckReport check_lpf(const lang::SingleWhileLoop& loop,
                      const LinearProgressFunction& cand,
                      const std::optional<Box>& box = std::nullopt);

// h, delta, zeta all scale by lambda > 0; verdicts are invariant under this.
SupermartingaleMap scale_certificate(const SupermartingaleMap& cand, const Rat& lambda);

// Re-evaluates the condition named by a refutation witness and confirms the
// violation is genuine.  Used by the replay property suite.
bool replay_witness(const lang::SingleWhileLoop& loop, const SupermartingaleMap& cand,
                    const Witness& w);
bool replay_witness(const lang::SingleWhileLoop& loop, const LinearProgressFunction& cand,
                    const Witness& w);

using Certificate = std::variant<SupermartingaleMap, LinearProgressFunction>;

// JSON certificate files: {"kind":"smap"|"lpf", "h":"<expr>", "delta":"1",
// "zeta":"1"|null} / {"kind":"lpf", "a":["1","0"], "c":"0"}.
Certificate load_certificate(const std::string& json_text,
                             const std::vector<std::string>& pvars);
Certificate load_certificate_file(const std::string& path,
                                  const std::vector<std::string>& pvars);
std::string certificate_json(const Certificate& cert,
                             const std::vector<std::string>& pvars);

} // namespace astprove::cert
