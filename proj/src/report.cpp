#include "astprove/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace astprove::report {

using ordered_json = nlohmann::ordered_json;

std::string method_name(Method m) {
  switch (m) {
    case Method::SmapDiffBounded: return "smap_diff_bounded";
    case Method::SmapGeneral: return "smap_general";
    case Method::CltLpf: return "clt_lpf";
    case Method::UserCertificate: return "user_certificate";
    case Method::Unknown: return "unknown";
  }
  return "unknown";
}

std::string verdict_name(cert::Verdict v) {
  switch (v) {
    case cert::Verdict::Certified: return "AST_certified";
    case cert::Verdict::CertifiedOnBox: return "AST_certified_on_box";
    case cert::Verdict::Refuted: return "refuted";
    case cert::Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string mode_name(cert::CheckMode m) {
  switch (m) {
    case cert::CheckMode::Symbolic: return "symbolic";
    case cert::CheckMode::Box: return "box";
    case cert::CheckMode::Statistical: return "statistical";
  }
  return "symbolic";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

ordered_json witness_json(const cert::Witness& w,
                          const std::vector<std::string>& pvars) {
  ordered_json j;
  j["condition"] = w.condition;
  ordered_json pv = ordered_json::object();
  for (std::size_t i = 0; i < w.pv.size() && i < pvars.size(); ++i)
    pv[pvars[i]] = w.pv[i];
  j["pv"] = std::move(pv);
  ordered_json rv = ordered_json::array();
  for (long long v : w.rv) rv.push_back(v);
  j["rv"] = std::move(rv);
  j["detail"] = w.detail;
  return j;
}

std::string tail_class(const LoopAnalysis& la) {
  if (!la.bound_series.empty())
    return la.bound_kind == bounds::Kind::DiffBounded ? "O(1/sqrt(k))" : "O(k^-1/6)";
  return "none";
}

} // namespace

std::string report_json(const AnalysisReport& r) {
  ordered_json j;
  j["tool"] = kToolName;
  j["schema"] = 1;
  j["program"] = r.program_name;
  j["program_hash"] = "fnv1a64:" + hex64(r.program_hash);
  ordered_json init = ordered_json::object();
  for (std::size_t i = 0; i < r.init.size() && i < r.pvars.size(); ++i)
    init[r.pvars[i]] = r.init[i];
  j["init"] = std::move(init);
  j["exit_code"] = r.exit_code;

  ordered_json loops = ordered_json::array();
  for (const auto& la : r.loops) {
    ordered_json l;
    l["loop_id"] = la.loop_id;
    l["guard"] = la.guard;
    l["method"] = method_name(la.method);
    l["verdict"] = verdict_name(la.check.verdict);
    l["mode"] = mode_name(la.check.mode);
    if (la.certificate) {
      l["certificate"] = ordered_json::parse(
          cert::certificate_json(*la.certificate, r.pvars));
      if (const auto* m = std::get_if<cert::SupermartingaleMap>(&*la.certificate)) {
        l["delta"] = rat_to_string(m->delta);
        l["zeta"] = m->zeta ? ordered_json(rat_to_string(*m->zeta))
                            : ordered_json(nullptr);
      } else {
        l["delta"] = nullptr;
        l["zeta"] = nullptr;
      }
    } else {
      l["certificate"] = nullptr;
      l["delta"] = nullptr;
      l["zeta"] = nullptr;
    }
    l["e_x0"] = la.e_x0 ? ordered_json(rat_to_string(*la.e_x0)) : ordered_json(nullptr);
    l["tail_class"] = tail_class(la);

    if (!la.bound_series.empty()) {
      ordered_json b;
      ordered_json inputs;
      inputs["e_x0"] = la.e_x0 ? rat_to_string(*la.e_x0) : "";
      const cert::SupermartingaleMap* m =
          la.certificate ? std::get_if<cert::SupermartingaleMap>(&*la.certificate)
                         : nullptr;
      inputs["delta"] = m ? rat_to_string(m->delta) : "";
      inputs["c_diff"] = m && m->zeta ? ordered_json(rat_to_string(*m->zeta))
                                      : ordered_json(nullptr);
      inputs["kind"] =
          la.bound_kind == bounds::Kind::DiffBounded ? "diff" : "general";
      b["inputs"] = std::move(inputs);
      ordered_json series = ordered_json::array();
      for (const auto& e : la.bound_series) {
        ordered_json row;
        row["k"] = e.k;
        row["bound"] = bigfloat_str(e.bound);
        if (la.bound_kind == bounds::Kind::DiffBounded)
          row["t"] = bigfloat_str(e.t, 17);
        row["valid"] = e.valid;
        series.push_back(std::move(row));
      }
      b["series"] = std::move(series);
      l["bounds"] = std::move(b);
    } else {
      l["bounds"] = nullptr;
    }

    if (!la.empirical.empty()) {
      ordered_json e;
      e["trials"] = la.trials;
      e["seed"] = la.seed;
      ordered_json series = ordered_json::array();
      for (const auto& te : la.empirical) {
        ordered_json row;
        row["k"] = te.k;
        row["estimate"] = bigfloat_str(te.estimate);
        row["w95_lo"] = bigfloat_str(te.w95_lo);
        row["w95_hi"] = bigfloat_str(te.w95_hi);
        series.push_back(std::move(row));
      }
      e["series"] = std::move(series);
      l["empirical"] = std::move(e);
    } else {
      l["empirical"] = nullptr;
    }

    ordered_json conds = ordered_json::array();
    for (const auto& cs : la.check.conditions) {
      ordered_json row;
      row["name"] = cs.name;
      row["holds"] = cs.holds;
      row["note"] = cs.note;
      conds.push_back(std::move(row));
    }
    l["conditions"] = std::move(conds);
    l["witness"] = la.check.witness ? witness_json(*la.check.witness, r.pvars)
                                    : ordered_json(nullptr);
    l["reason"] = la.check.reason;
    l["note"] = la.note;
    loops.push_back(std::move(l));
  }
  j["loops"] = std::move(loops);
  return j.dump(2) + "\n";
}

std::string report_csv(const AnalysisReport& r) {
  std::ostringstream out;
  out << "loop,k,bound,method,t,valid,estimate,w95_lo,w95_hi\n";
  for (const auto& la : r.loops) {
    std::map<long long, std::pair<const bounds::BoundResult*, const sim::TailEstimate*>>
        rows;
    for (const auto& b : la.bound_series) rows[b.k].first = &b;
    for (const auto& e : la.empirical) rows[e.k].second = &e;
    for (const auto& [k, pr] : rows) {
      out << la.loop_id << "," << k << ",";
      if (pr.first) out << bigfloat_str(pr.first->bound);
      out << "," << method_name(la.method) << ",";
      if (pr.first && la.bound_kind == bounds::Kind::DiffBounded)
        out << bigfloat_str(pr.first->t, 17);
      out << ",";
      if (pr.first) out << (pr.first->valid ? 1 : 0);
      out << ",";
      if (pr.second) out << bigfloat_str(pr.second->estimate);
      out << ",";
      if (pr.second) out << bigfloat_str(pr.second->w95_lo);
      out << ",";
      if (pr.second) out << bigfloat_str(pr.second->w95_hi);
      out << "\n";
    }
  }
  return out.str();
}

} // namespace astprove::report
