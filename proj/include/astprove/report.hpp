#pragma once

#include "astprove/bounds.hpp"
#include "astprove/certificates.hpp"
#include "astprove/simulator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace astprove::report {

inline constexpr const char* kToolName = "astprove 0.1.0";

// How a loop's certificate was obtained and what decay family it supports.
enum class Method {
  SmapDiffBounded,  // supermartingale map with a finite step bound
  SmapGeneral,      // supermartingale map without a step bound
  CltLpf,           // linear progress function (variance-driven progress)
  UserCertificate,  // supplied by the caller, any shape
  Unknown,          // nothing certified this loop
};

std::string method_name(Method m);
std::string verdict_name(cert::Verdict v);
std::string mode_name(cert::CheckMode m);

struct LoopAnalysis {
  std::size_t loop_id = 0;
  std::string guard;  // printed source form
  Method method = Method::Unknown;
  cert::CheckReport check;
  std::optional<cert::Certificate> certificate;
  std::optional<Rat> e_x0;  // certificate value at the loop's entry state
  bounds::Kind bound_kind = bounds::Kind::DiffBounded;
  std::vector<bounds::BoundResult> bound_series;
  unsigned long long trials = 0;
  std::uint64_t seed = 0;
  std::vector<sim::TailEstimate> empirical;
  std::string note;
};

struct AnalysisReport {
  std::string program_name;
  std::uint64_t program_hash = 0;  // FNV-1a over the source bytes
  std::vector<std::string> pvars;
  std::vector<long long> init;
  std::vector<LoopAnalysis> loops;
  int exit_code = 0;
};

std::uint64_t fnv1a64(const std::string& bytes);

// Deterministic JSON rendering: same report, byte-identical output.
std::string report_json(const AnalysisReport& r);

// Flat projection: loop,k,bound,method,t,valid,estimate,w95_lo,w95_hi with
// empty cells where a series lacks that k.
std::string report_csv(const AnalysisReport& r);

} // namespace astprove::report
