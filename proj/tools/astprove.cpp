#include "astprove/bounds.hpp"
#include "astprove/certificates.hpp"
#include "astprove/normalize.hpp"
#include "astprove/parser.hpp"
#include "astprove/printer.hpp"
#include "astprove/report.hpp"
#include "astprove/semantics.hpp"
#include "astprove/simulator.hpp"
#include "astprove/synthesis.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace astprove;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::vector<long long> parse_ks(const std::string& s) {
  std::vector<long long> ks;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) ks.push_back(std::stoll(tok));
  return ks;
}

// "x=1,y=-2"; unmentioned variables start at 0.
std::vector<long long> parse_init(const std::string& s, const lang::Program& prog) {
  std::vector<long long> init(prog.pvars.size(), 0);
  if (s.empty()) return init;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad --init entry '" + tok + "' (want name=value)");
    std::string name = tok.substr(0, eq);
    int idx = prog.pvar_index(name);
    if (idx < 0) throw std::runtime_error("--init names unknown variable '" + name + "'");
    init[static_cast<std::size_t>(idx)] = std::stoll(tok.substr(eq + 1));
  }
  return init;
}

// "lo..hi" applied to every program variable.
std::optional<cert::Box> parse_box(const std::string& s, std::size_t n) {
  if (s.empty()) return std::nullopt;
  auto dots = s.find("..");
  if (dots == std::string::npos)
    throw std::runtime_error("bad --box '" + s + "' (want lo..hi)");
  long long lo = std::stoll(s.substr(0, dots));
  long long hi = std::stoll(s.substr(dots + 2));
  if (lo > hi) throw std::runtime_error("--box range is empty");
  cert::Box box;
  box.range.assign(n, {lo, hi});
  return box;
}

bool uses_rvar(const lang::Stmt& s) {
  switch (s.kind) {
    case lang::Stmt::Kind::Skip: return false;
    case lang::Stmt::Kind::Assign:
      for (const auto& t : s.rhs.terms)
        if (t.rvar >= 0) return true;
      return false;
    case lang::Stmt::Kind::Seq: return uses_rvar(*s.a) || uses_rvar(*s.b);
    case lang::Stmt::Kind::If:
      return uses_rvar(*s.a) || (s.b && uses_rvar(*s.b));
    case lang::Stmt::Kind::While: return s.a && uses_rvar(*s.a);
  }
  return false;
}

// Runs a loop-free block with a fresh sample vector per top-level statement.
void run_block_sampled(const lang::Stmt& s, const lang::Program& prog,
                       std::vector<long long>& pv, dist::Rng& rng) {
  if (s.kind == lang::Stmt::Kind::Seq) {
    run_block_sampled(*s.a, prog, pv, rng);
    run_block_sampled(*s.b, prog, pv, rng);
    return;
  }
  std::vector<long long> rv(prog.sampling.size(), 0);
  prog.sampling.sample_into(rng, rv);
  lang::exec_loop_free(s, pv, rv);
}

Rat cert_value_at(const cert::Certificate& c, std::span<const long long> pv) {
  if (const auto* m = std::get_if<cert::SupermartingaleMap>(&c)) return m->h.eval(pv);
  const auto& f = std::get<cert::LinearProgressFunction>(c);
  Rat v = f.c;
  for (std::size_t i = 0; i < f.a.size(); ++i) v += f.a[i] * Rat(pv[i]);
  return v;
}

// Smallest value of a^T pv over guard states of the box, if any.
std::optional<Rat> box_min_level(const lang::SingleWhileLoop& loop,
                                 const cert::LinearProgressFunction& f,
                                 const cert::Box& box) {
  if (box.range.size() != loop.pvars.size()) return std::nullopt;
  std::optional<Rat> best;
  std::vector<long long> pv(box.range.size());
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == pv.size()) {
      if (!loop.guard.eval(pv)) return;
      Rat v = 0;
      for (std::size_t j = 0; j < pv.size(); ++j) v += f.a[j] * Rat(pv[j]);
      if (!best || v < *best) best = v;
      return;
    }
    for (long long x = box.range[i].first; x <= box.range[i].second; ++x) {
      pv[i] = x;
      walk(i + 1);
    }
  };
  walk(0);
  return best;
}

// Tries the synthesizers and fallback templates on one loop; fills method,
// check report, and certificate.
void analyze_loop(const lang::SingleWhileLoop& loop,
                  const std::optional<cert::Box>& box, report::LoopAnalysis& la) {
  std::string notes;
  try {
    auto sm = synth::synth_smap_linear(loop);
    if (auto* m = std::get_if<cert::SupermartingaleMap>(&sm)) {
      la.method = m->zeta ? report::Method::SmapDiffBounded
                          : report::Method::SmapGeneral;
      la.check = cert::check_smap(loop, *m, std::nullopt);
      la.certificate = *m;
      return;
    }
    notes = "linear level search: " + std::get<synth::NotFound>(sm).reason;
    auto lf = synth::synth_lpf(loop);
    if (auto* f = std::get_if<cert::LinearProgressFunction>(&lf)) {
      la.method = report::Method::CltLpf;
      la.check = cert::check_lpf(loop, *f, std::nullopt);
      la.certificate = *f;
      la.note = notes;
      return;
    }
    notes += "; progress search: " + std::get<synth::NotFound>(lf).reason;
    if (box && loop.incremental) {
      // The drift/variance part may still close symbolically; raise the level
      // constant until the candidate clears the box, then check there.
      auto l3 = synth::synth_lpf_drift_only(loop);
      if (auto* f = std::get_if<cert::LinearProgressFunction>(&l3)) {
        if (auto lvl = box_min_level(loop, *f, *box)) {
          f->c = Rat(1) - *lvl;
          auto repc = cert::check_lpf(loop, *f, box);
          if (repc.verdict == cert::Verdict::CertifiedOnBox) {
            la.method = report::Method::CltLpf;
            la.check = repc;
            la.certificate = *f;
            la.note = notes + "; level constant raised to clear the box";
            return;
          }
        }
      }
    }
  } catch (const cert::NotIncremental& e) {
    notes = e.what();
    if (box && loop.pvars.size() == 1) {
      // Offset template x + K: no step bound claimed, so only the level,
      // drift, and progress conditions must clear the box.
      for (long long K : {1, 2, 4}) {
        cert::SupermartingaleMap cand;
        cand.h = cert::CertExpr(1);
        cand.h.a[0] = 1;
        cand.h.c = K;
        cand.delta = 1;
        auto repc = cert::check_smap(loop, cand, box);
        if (repc.verdict == cert::Verdict::CertifiedOnBox) {
          la.method = report::Method::SmapGeneral;
          la.check = repc;
          la.certificate = cand;
          la.note = notes + "; offset template certified on the box";
          return;
        }
      }
    }
  }
  la.method = report::Method::Unknown;
  la.check = {cert::Verdict::Inconclusive, cert::CheckMode::Symbolic, {}, std::nullopt,
              "no certificate found"};
  la.note = notes;
}

int cmd_analyze(const std::string& file, const std::string& init_str,
                const std::string& ks_str, unsigned long long trials,
                std::uint64_t seed, const std::string& box_str,
                const std::string& out_path, const std::string& csv_path) {
  const std::string text = slurp(file);
  lang::Program prog = lang::parse_program(text, file);
  lang::NormalizedProgram np = lang::normalize(prog);
  const auto init = parse_init(init_str, prog);
  const auto ks = parse_ks(ks_str);
  const auto box = parse_box(box_str, prog.pvars.size());

  report::AnalysisReport rep;
  rep.program_name = file;
  rep.program_hash = report::fnv1a64(text);
  rep.pvars = prog.pvars;
  rep.init = init;

  std::vector<long long> state = init;
  bool state_known = true;
  std::size_t loop_id = 0;
  for (const auto& comp : np.components) {
    if (const auto* blk = std::get_if<lang::LoopFreeBlock>(&comp)) {
      if (state_known && !uses_rvar(*blk->stmt)) {
        std::vector<long long> rv(prog.sampling.size(), 0);
        lang::exec_loop_free(*blk->stmt, state, rv);
      } else {
        state_known = false;
      }
      continue;
    }
    const auto& loop = std::get<lang::SingleWhileLoop>(comp);
    report::LoopAnalysis la;
    la.loop_id = loop_id++;
    la.guard = lang::print_guard(loop.guard, prog);
    analyze_loop(loop, box, la);

    const bool certified = la.check.verdict == cert::Verdict::Certified ||
                           la.check.verdict == cert::Verdict::CertifiedOnBox;
    if (la.certificate && state_known) la.e_x0 = cert_value_at(*la.certificate, state);
    if (certified && la.e_x0 && *la.e_x0 > 0 && !ks.empty() &&
        (la.method == report::Method::SmapDiffBounded ||
         la.method == report::Method::SmapGeneral)) {
      const auto& m = std::get<cert::SupermartingaleMap>(*la.certificate);
      bounds::BoundInput bi;
      bi.e_x0 = *la.e_x0;
      bi.delta = m.delta;
      bi.c_diff = m.zeta;
      bi.kind = m.zeta ? bounds::Kind::DiffBounded : bounds::Kind::General;
      la.bound_kind = bi.kind;
      la.bound_series = bounds::bound_series(bi, ks);
    }
    if (trials > 0 && !ks.empty()) {
      if (state_known) {
        la.trials = trials;
        la.seed = seed;
        la.empirical = sim::estimate_tail(loop, state, ks, trials, seed);
      } else {
        la.note += (la.note.empty() ? "" : "; ") +
                   std::string("empirical series skipped: the entry state "
                               "depends on earlier randomness");
      }
    }
    rep.loops.push_back(std::move(la));
    state_known = false; // past a loop the state is no longer a single point
  }

  // A certified bound must sit above the matching empirical lower confidence
  // limit wherever both were computed; anything else is an internal error.
  for (const auto& la : rep.loops) {
    if (la.check.verdict != cert::Verdict::Certified &&
        la.check.verdict != cert::Verdict::CertifiedOnBox)
      continue;
    for (const auto& b : la.bound_series) {
      if (!b.valid) continue;
      for (const auto& e : la.empirical) {
        if (e.k != b.k) continue;
        if (b.bound < e.w95_lo) {
          std::cerr << "error: loop " << la.loop_id << " at k=" << b.k
                    << ": bound " << bigfloat_str(b.bound)
                    << " is below the empirical lower confidence limit "
                    << bigfloat_str(e.w95_lo) << "\n";
          return 1;
        }
      }
    }
  }

  bool any_box = false, any_open = false;
  for (const auto& la : rep.loops) {
    if (la.check.verdict == cert::Verdict::CertifiedOnBox)
      any_box = true;
    else if (la.check.verdict != cert::Verdict::Certified)
      any_open = true;
  }
  rep.exit_code = any_open ? 3 : any_box ? 2 : 0;

  const std::string json = report_json(rep);
  if (out_path.empty())
    std::cout << json;
  else
    spill(out_path, json);
  if (!csv_path.empty()) spill(csv_path, report_csv(rep));
  return rep.exit_code;
}

int cmd_check(const std::string& file, const std::string& cert_path,
              std::size_t loop_idx, const std::string& box_str,
              const std::string& out_path) {
  const std::string text = slurp(file);
  lang::Program prog = lang::parse_program(text, file);
  lang::NormalizedProgram np = lang::normalize(prog);
  auto loops = np.loops();
  if (loops.empty()) throw std::runtime_error("the program has no loop to check");
  if (loop_idx >= loops.size())
    throw std::runtime_error("--loop " + std::to_string(loop_idx) +
                             " is out of range (program has " +
                             std::to_string(loops.size()) + ")");
  const auto& loop = *loops[loop_idx];
  const auto certificate = cert::load_certificate_file(cert_path, prog.pvars);
  const auto box = parse_box(box_str, prog.pvars.size());

  cert::CheckReport rep;
  if (const auto* m = std::get_if<cert::SupermartingaleMap>(&certificate))
    rep = cert::check_smap(loop, *m, box);
  else
    rep = cert::check_lpf(loop, std::get<cert::LinearProgressFunction>(certificate),
                          box);

  std::cout << "verdict: " << report::verdict_name(rep.verdict) << " ("
            << report::mode_name(rep.mode) << ")\n";
  for (const auto& c : rep.conditions)
    std::cout << "  " << c.name << ": " << (c.holds ? "ok" : "VIOLATED")
              << (c.note.empty() ? "" : " - " + c.note) << "\n";
  if (!rep.reason.empty()) std::cout << "reason: " << rep.reason << "\n";
  if (rep.witness) {
    const auto& w = *rep.witness;
    std::cout << "witness: condition " << w.condition << " pv=(";
    for (std::size_t i = 0; i < w.pv.size(); ++i)
      std::cout << (i ? "," : "") << w.pv[i];
    std::cout << ") rv=(";
    for (std::size_t i = 0; i < w.rv.size(); ++i)
      std::cout << (i ? "," : "") << w.rv[i];
    std::cout << ")\n  " << w.detail << "\n";
    bool confirmed =
        std::visit([&](const auto& c) { return cert::replay_witness(loop, c, w); },
                   certificate);
    std::cout << "replay: " << (confirmed ? "confirmed" : "NOT confirmed") << "\n";
  }

  if (!out_path.empty()) {
    report::AnalysisReport full;
    full.program_name = file;
    full.program_hash = report::fnv1a64(text);
    full.pvars = prog.pvars;
    full.init.assign(prog.pvars.size(), 0);
    report::LoopAnalysis la;
    la.loop_id = loop_idx;
    la.guard = lang::print_guard(loop.guard, prog);
    la.method = report::Method::UserCertificate;
    la.check = rep;
    la.certificate = certificate;
    full.exit_code = rep.verdict == cert::Verdict::Refuted         ? 4
                     : rep.verdict == cert::Verdict::Inconclusive ? 5
                                                                  : 0;
    full.loops.push_back(std::move(la));
    spill(out_path, report_json(full));
  }
  switch (rep.verdict) {
    case cert::Verdict::Certified:
    case cert::Verdict::CertifiedOnBox: return 0;
    case cert::Verdict::Refuted: return 4;
    case cert::Verdict::Inconclusive: return 5;
  }
  return 5;
}

int cmd_simulate(const std::string& file, const std::string& init_str,
                 const std::string& ks_str, unsigned long long trials,
                 std::uint64_t seed, std::size_t loop_idx,
                 const std::string& csv_path) {
  lang::Program prog = lang::parse_file(file);
  lang::NormalizedProgram np = lang::normalize(prog);
  auto loops = np.loops();
  if (loops.empty()) throw std::runtime_error("the program has no loop to simulate");
  if (loop_idx >= loops.size())
    throw std::runtime_error("--loop " + std::to_string(loop_idx) +
                             " is out of range (program has " +
                             std::to_string(loops.size()) + ")");
  auto ks = parse_ks(ks_str);
  if (ks.empty()) throw std::runtime_error("--ks is required for simulate");
  if (trials == 0) throw std::runtime_error("--trials must be positive");

  // Fast-forward deterministically where possible; prefix blocks that do use
  // randomness draw one fresh sample vector per top-level statement.
  std::vector<long long> state = parse_init(init_str, prog);
  dist::Rng prefix_rng = dist::trial_stream(seed, ~0ULL);
  std::size_t seen = 0;
  for (const auto& comp : np.components) {
    if (const auto* blk = std::get_if<lang::LoopFreeBlock>(&comp)) {
      if (uses_rvar(*blk->stmt)) {
        run_block_sampled(*blk->stmt, prog, state, prefix_rng);
      } else {
        std::vector<long long> rv(prog.sampling.size(), 0);
        lang::exec_loop_free(*blk->stmt, state, rv);
      }
      continue;
    }
    if (seen == loop_idx) break;
    throw std::runtime_error(
        "loop " + std::to_string(loop_idx) +
        " sits behind another loop; simulate loops one at a time from their "
        "own entry state (--init)");
  }
  const auto& loop = *loops[loop_idx];
  auto series = sim::estimate_tail(loop, state, ks, trials, seed);
  const std::string csv = sim::tail_csv(series);
  if (csv_path.empty())
    std::cout << csv;
  else
    spill(csv_path, csv);
  return 0;
}

int cmd_bound(const std::string& e_x0, const std::string& delta,
              const std::string& zeta, const std::string& kind,
              const std::string& ks_str, const std::string& t_str,
              const std::string& csv_path) {
  bounds::BoundInput in;
  in.e_x0 = parse_rat(e_x0);
  in.delta = parse_rat(delta);
  if (!zeta.empty()) in.c_diff = parse_rat(zeta);
  if (kind == "diff")
    in.kind = bounds::Kind::DiffBounded;
  else if (kind == "general")
    in.kind = bounds::Kind::General;
  else
    throw std::runtime_error("--kind must be diff or general");
  auto ks = parse_ks(ks_str);
  if (ks.empty()) throw std::runtime_error("--ks is required for bound");

  std::vector<bounds::BoundResult> series;
  if (!t_str.empty()) {
    if (in.kind != bounds::Kind::DiffBounded)
      throw std::runtime_error("--t applies to the diff kind only");
    for (long long k : ks)
      series.push_back(bounds::bound_diff(in, k, BigFloat(t_str)));
  } else {
    series = bounds::bound_series(in, ks);
  }
  const std::string csv = bounds_csv(series, in.kind);
  if (csv_path.empty())
    std::cout << csv;
  else
    spill(csv_path, csv);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  if (const char* p = std::getenv("ASTPROVE_PRECISION")) {
    int digits = std::atoi(p);
    if (digits >= 15 && digits <= 10000) set_float_digits(static_cast<unsigned>(digits));
  }
  apply_float_precision();

  CLI::App app{"Termination certificates and tail bounds for integer "
               "probabilistic while-programs"};
  app.require_subcommand(1);

  std::string file, init_str, ks_str, box_str, out_path, csv_path, cert_path;
  std::string e_x0_str, delta_str = "1", zeta_str, kind_str = "diff", t_str;
  unsigned long long trials = 0;
  std::uint64_t seed = 42;
  std::size_t loop_idx = 0;

  auto* analyze = app.add_subcommand(
      "analyze", "Find and check certificates; emit a report with tail bounds");
  analyze->add_option("file", file, "program file")->required();
  analyze->add_option("--init", init_str, "entry values, e.g. x=1,y=2 (default 0)");
  analyze->add_option("--ks", ks_str, "comma-separated k values for the series");
  analyze->add_option("--trials", trials, "Monte Carlo trials per loop (0 = none)");
  analyze->add_option("--seed", seed, "Monte Carlo seed");
  analyze->add_option("--box", box_str, "lo..hi window for box-mode checks");
  analyze->add_option("--out", out_path, "write the JSON report here");
  analyze->add_option("--csv", csv_path, "write the flat CSV projection here");

  auto* check = app.add_subcommand("check", "Check a user certificate on one loop");
  check->add_option("file", file, "program file")->required();
  check->add_option("--cert", cert_path, "certificate JSON file")->required();
  check->add_option("--loop", loop_idx, "loop index (default 0)");
  check->add_option("--box", box_str, "lo..hi window for box-mode checks");
  check->add_option("--out", out_path, "write a JSON report here");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tail estimates");
  simulate->add_option("file", file, "program file")->required();
  simulate->add_option("--init", init_str, "entry values, e.g. x=1 (default 0)");
  simulate->add_option("--ks", ks_str, "comma-separated k values")->required();
  simulate->add_option("--trials", trials, "number of trials")->required();
  simulate->add_option("--seed", seed, "stream seed");
  simulate->add_option("--loop", loop_idx, "loop index (default 0)");
  simulate->add_option("--csv", csv_path, "write the CSV here (default stdout)");

  auto* bound = app.add_subcommand("bound", "Evaluate tail bounds directly");
  bound->add_option("--e-x0", e_x0_str, "expected starting level")->required();
  bound->add_option("--delta", delta_str, "progress level (default 1)");
  bound->add_option("--zeta", zeta_str, "step bound (diff kind)");
  bound->add_option("--kind", kind_str, "diff or general (default diff)");
  bound->add_option("--ks", ks_str, "comma-separated k values")->required();
  bound->add_option("--t", t_str, "explicit evaluation point (diff kind)");
  bound->add_option("--csv", csv_path, "write the CSV here (default stdout)");

  auto* parse = app.add_subcommand("parse", "Parse and pretty-print a program");
  parse->add_option("file", file, "program file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed())
      return cmd_analyze(file, init_str, ks_str, trials, seed, box_str, out_path,
                         csv_path);
    if (check->parsed()) return cmd_check(file, cert_path, loop_idx, box_str, out_path);
    if (simulate->parsed())
      return cmd_simulate(file, init_str, ks_str, trials, seed, loop_idx, csv_path);
    if (bound->parsed())
      return cmd_bound(e_x0_str, delta_str, zeta_str, kind_str, ks_str, t_str,
                       csv_path);
    if (parse->parsed()) {
      std::cout << lang::print_program(lang::parse_file(file));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
