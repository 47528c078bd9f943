#pragma once

#include <json.hpp>
#include <string>

#include "thinlev/process/sample.hpp"

namespace thinlev::process {

// Binary-free JSON form of one realization: enough to replay the sample
// byte-for-byte (the law grids are rebuilt deterministically from the header).
inline nlohmann::json sample_to_json(const ClockSample& s) {
  const PathLaw& L = *s.law;
  nlohmann::json j;
  j["format"] = "thinlev-clock-sample/1";
  j["tau"] = L.params.tau;
  j["beta_tilde"] = L.params.beta_tilde;
  j["u"] = L.u;
  j["head_cutoff"] = L.scheme.head_cutoff;
  j["tail_mode"] =
      L.scheme.tail_mode == TruncationScheme::TailMode::gaussian ? "gaussian" : "mean_only";
  j["tail_grid_step"] = L.scheme.tail_grid_step;
  j["measure"] = L.measure.is_tilted() ? "tilted" : "original";
  if (L.measure.is_tilted()) j["theta"] = L.measure.theta;
  j["excluded"] = L.excluded;
  j["seed"] = s.seed;
  j["replica"] = s.replica;
  j["first_dense"] = s.first_dense;
  // JSON has no +inf; -1 marks "no jump in [0,u]"
  auto& dt = j["dense_times"] = nlohmann::json::array();
  for (double t : s.dense_times) dt.push_back(std::isinf(t) ? -1.0 : t);
  auto& ev = j["head_jumps"] = nlohmann::json::array();
  for (const auto& e : s.events) ev.push_back({e.t, e.size});
  j["tail_noise_cum"] = s.noise_cum;
  return j;
}

inline ClockSample sample_from_json(const nlohmann::json& j) {
  if (j.at("format").get<std::string>() != "thinlev-clock-sample/1")
    throw std::invalid_argument("sample_from_json: unknown format tag");
  ModelParams params = make_params(j.at("tau").get<double>(), j.at("beta_tilde").get<double>());
  TruncationScheme scheme;
  scheme.head_cutoff = j.at("head_cutoff").get<long long>();
  scheme.tail_mode = j.at("tail_mode").get<std::string>() == "gaussian"
                         ? TruncationScheme::TailMode::gaussian
                         : TruncationScheme::TailMode::mean_only;
  scheme.tail_grid_step = j.at("tail_grid_step").get<double>();
  Measure measure = j.at("measure").get<std::string>() == "tilted"
                        ? Measure::tilted(j.at("theta").get<double>())
                        : Measure::original();
  auto law = PathLaw::build(params, j.at("u").get<double>(), scheme, measure,
                            j.at("excluded").get<long long>(), /*strict=*/false);
  ClockSample s;
  s.law = law;
  s.seed = j.at("seed").get<uint64_t>();
  s.replica = j.at("replica").get<uint64_t>();
  s.first_dense = j.at("first_dense").get<long long>();
  for (const auto& t : j.at("dense_times"))
    s.dense_times.push_back(t.get<double>() < 0.0 ? kInf : t.get<double>());
  for (const auto& e : j.at("head_jumps")) s.events.push_back({e.at(0), e.at(1)});
  s.noise_cum = j.at("tail_noise_cum").get<std::vector<double>>();
  detail::finalize_events(s);
  return s;
}

}  // namespace thinlev::process
