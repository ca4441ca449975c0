#pragma once

// summary.json: verdict fields plus bookkeeping for one run.
//
// {
//   "digest": "<16 hex digits>", "seed": 7, "n": 7, "t_end": 10.0,
//   "verdict": {
//     "hull_ok": true, "hull_violation": null | {"t", "node", "x"},
//     "monotone_ok": true, "diameter_final": 0.004, "threshold": 0.03,
//     "t_conv": 0.35 | null, "zeno_ok": true,
//     "settle_witnesses": null | {"low", "high", "settle_time"},
//     "lemma3": "pass" | "fail" | "not_applicable",
//     "consensus_ok": true
//   },
//   "event_counts": [..per node..],
//   "warnings": [..],
//   "wall_time_s": 0.12
// }

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcsim/metrics.hpp"

namespace rcsim {

struct Summary {
  std::string digest;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double t_end = 0.0;
  Verdict verdict;
  std::vector<std::size_t> event_counts;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;
};

inline Lemma3Status lemma3_from_string(const std::string& s) {
  if (s == "pass") return Lemma3Status::Pass;
  if (s == "fail") return Lemma3Status::Fail;
  if (s == "not_applicable") return Lemma3Status::NotApplicable;
  throw std::invalid_argument("unknown lemma3 status '" + s + "'");
}

inline nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["hull_ok"] = v.hull_ok;
  j["hull_violation"] = v.hull_violation
                            ? nlohmann::json{{"t", v.hull_violation->t}, {"node", v.hull_violation->node}, {"x", v.hull_violation->x}}
                            : nlohmann::json(nullptr);
  j["monotone_ok"] = v.monotone_ok;
  j["diameter_final"] = v.diameter_final;
  j["threshold"] = v.threshold;
  j["t_conv"] = v.t_conv ? nlohmann::json(*v.t_conv) : nlohmann::json(nullptr);
  j["zeno_ok"] = v.zeno_ok;
  j["settle_witnesses"] = v.settle_witnesses ? nlohmann::json{{"low", v.settle_witnesses->low},
                                                              {"high", v.settle_witnesses->high},
                                                              {"settle_time", v.settle_witnesses->settle_time}}
                                             : nlohmann::json(nullptr);
  j["lemma3"] = to_string(v.lemma3);
  j["consensus_ok"] = v.consensus_ok();
  return j;
}

inline Verdict verdict_from_json(const nlohmann::json& j) {
  Verdict v;
  v.hull_ok = j.at("hull_ok").get<bool>();
  if (const auto& h = j.at("hull_violation"); !h.is_null()) {
    v.hull_violation = HullViolation{h.at("t").get<double>(), h.at("node").get<NodeId>(), h.at("x").get<double>()};
  }
  v.monotone_ok = j.at("monotone_ok").get<bool>();
  v.diameter_final = j.at("diameter_final").get<double>();
  v.threshold = j.at("threshold").get<double>();
  if (const auto& t = j.at("t_conv"); !t.is_null()) v.t_conv = t.get<double>();
  v.zeno_ok = j.at("zeno_ok").get<bool>();
  if (const auto& w = j.at("settle_witnesses"); !w.is_null()) {
    v.settle_witnesses =
        SettleWitnesses{w.at("low").get<NodeId>(), w.at("high").get<NodeId>(), w.at("settle_time").get<double>()};
  }
  v.lemma3 = lemma3_from_string(j.at("lemma3").get<std::string>());
  return v;
}

inline nlohmann::json to_json(const Summary& s) {
  nlohmann::json j;
  j["digest"] = s.digest;
  j["seed"] = s.seed;
  j["n"] = s.n;
  j["t_end"] = s.t_end;
  j["verdict"] = to_json(s.verdict);
  j["event_counts"] = s.event_counts;
  j["warnings"] = s.warnings;
  j["wall_time_s"] = s.wall_time_s;
  return j;
}

inline Summary summary_from_json(const nlohmann::json& j) {
  Summary s;
  s.digest = j.at("digest").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.n = j.at("n").get<std::size_t>();
  s.t_end = j.at("t_end").get<double>();
  s.verdict = verdict_from_json(j.at("verdict"));
  s.event_counts = j.at("event_counts").get<std::vector<std::size_t>>();
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  s.wall_time_s = j.at("wall_time_s").get<double>();
  return s;
}

// Verdicts that --assert turns into a non-zero exit.
inline bool verdict_passes(const Verdict& v) {
  return v.consensus_ok() && v.monotone_ok && v.zeno_ok && v.lemma3 != Lemma3Status::Fail;
}

}  // namespace rcsim
