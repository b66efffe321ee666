#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mecoff/error.hpp"
#include "mecoff/gev.hpp"

namespace mecoff {

namespace detail {

// ceil() that ignores representation noise: 0.349 / 0.001 is 348.99999999999994
// in binary and must still map to 349 slots, while 1000.0000000000001 must not
// become 1001.
inline std::int64_t robust_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace detail

/// Whole slots needed to run `workload` cycles at `freq_hz` with slot length
/// `delta_s`; zero only for an empty workload.
inline std::int64_t exec_slots(std::int64_t workload, double freq_hz, double delta_s) {
  if (!(freq_hz > 0.0)) throw Error("exec_slots: frequency must be positive");
  if (workload <= 0) return 0;
  return std::max<std::int64_t>(1, detail::robust_ceil(static_cast<double>(workload) / (freq_hz * delta_s)));
}

/// Device, server and channel constants for one problem instance.
///
/// Transfer-time quantiles are kept in seconds (as fitted) and converted once
/// to whole slots; every timing check works on integer slots.
struct SystemParams {
  double f_c_hz = 1.5e9;
  double f_s_hz = 2.4e9;
  double kappa = 1e-24;
  double delta_s = 1e-3;
  std::int64_t deadline_slots = 5000;
  double eps_m_up = 0.1;
  double eps_m_down = 0.1;
  double z_up_s = 0.349;
  double z_down_s = 0.107;
  double theta_up = 4.81e-4;
  double theta_down = 1.11e-5;
  double epsilon = 0.03;
  std::uint64_t seed = 20240611;
  std::int64_t block_size_k = 1500;
  std::string energy_unit = "mJ";
  // Fitted transfer-time distributions; when present, z_up_s / z_down_s can
  // be re-derived for any extreme-event probability.
  std::optional<GevParams> gev_v_up;
  std::optional<GevParams> gev_v_down;

  [[nodiscard]] std::int64_t z_up_slots() const { return detail::robust_ceil(z_up_s / delta_s); }
  [[nodiscard]] std::int64_t z_down_slots() const { return detail::robust_ceil(z_down_s / delta_s); }
  [[nodiscard]] std::int64_t client_slots(std::int64_t workload) const { return exec_slots(workload, f_c_hz, delta_s); }
  [[nodiscard]] std::int64_t server_slots(std::int64_t workload) const { return exec_slots(workload, f_s_hz, delta_s); }
  // kappa * f_c^2 per cycle.
  [[nodiscard]] double local_energy(std::int64_t workload) const {
    return kappa * static_cast<double>(workload) * f_c_hz * f_c_hz;
  }

  // Recomputes the transfer-time quantiles at new extreme-event probabilities
  // from the stored GEV fits.
  void set_extreme_probabilities(double up, double down) {
    if (!gev_v_up || !gev_v_down) throw Error("set_extreme_probabilities: configuration carries no GEV fits");
    eps_m_up = up;
    eps_m_down = down;
    z_up_s = gev_quantile(*gev_v_up, up);
    z_down_s = gev_quantile(*gev_v_down, down);
  }
};

/// Throws Error naming the first violated invariant.
inline void validate_params(const SystemParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string("config: '") + name + "' must be positive");
  };
  positive(p.f_c_hz, "f_c_hz");
  positive(p.f_s_hz, "f_s_hz");
  positive(p.kappa, "kappa");
  positive(p.delta_s, "delta_s");
  positive(p.z_up_s, "z_up_s");
  positive(p.z_down_s, "z_down_s");
  positive(p.theta_up, "theta_up");
  positive(p.theta_down, "theta_down");
  if (p.deadline_slots < 1) throw Error("config: 'deadline_slots' must be at least 1");
  if (!(p.eps_m_up > 0 && p.eps_m_up < 1)) throw Error("config: 'eps_m_up' must lie in (0, 1)");
  if (!(p.eps_m_down > 0 && p.eps_m_down < 1)) throw Error("config: 'eps_m_down' must lie in (0, 1)");
  if (!(p.epsilon >= 0 && p.epsilon < 1)) throw Error("config: 'epsilon' must lie in [0, 1)");
  if (p.block_size_k < 1) throw Error("config: 'block_size_k' must be at least 1");
}

inline nlohmann::ordered_json gev_to_json(const GevParams& g) {
  return {{"mu", g.mu}, {"sigma", g.sigma}, {"xi", g.xi}};
}

inline GevParams gev_from_json(const nlohmann::json& j) {
  try {
    GevParams g{j.at("mu").get<double>(), j.at("sigma").get<double>(), j.at("xi").get<double>()};
    if (!(g.sigma > 0)) throw ParseError("GEV parameters: sigma must be positive");
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("GEV parameters: ") + e.what());
  }
}

inline nlohmann::ordered_json params_to_json(const SystemParams& p) {
  nlohmann::ordered_json j{{"f_c_hz", p.f_c_hz},         {"f_s_hz", p.f_s_hz},
                           {"kappa", p.kappa},           {"delta_s", p.delta_s},
                           {"deadline_slots", p.deadline_slots}, {"eps_m_up", p.eps_m_up},
                           {"eps_m_down", p.eps_m_down}, {"z_up_s", p.z_up_s},
                           {"z_down_s", p.z_down_s},     {"theta_up", p.theta_up},
                           {"theta_down", p.theta_down}, {"epsilon", p.epsilon},
                           {"seed", p.seed},             {"block_size_k", p.block_size_k},
                           {"energy_unit", p.energy_unit}};
  if (p.gev_v_up) j["gev_v_up"] = gev_to_json(*p.gev_v_up);
  if (p.gev_v_down) j["gev_v_down"] = gev_to_json(*p.gev_v_down);
  return j;
}

/// Overlays the keys present in `j` on `base`; unknown keys are ignored so
/// fitted-parameter fragments can be merged into a full configuration.
inline SystemParams params_from_json(const nlohmann::json& j, SystemParams base = {}) {
  if (!j.is_object()) throw ParseError("config: document must be an object");
  try {
    auto num = [&](const char* key, double& dst) {
      if (j.contains(key)) dst = j.at(key).get<double>();
    };
    num("f_c_hz", base.f_c_hz);
    num("f_s_hz", base.f_s_hz);
    num("kappa", base.kappa);
    num("delta_s", base.delta_s);
    num("eps_m_up", base.eps_m_up);
    num("eps_m_down", base.eps_m_down);
    num("z_up_s", base.z_up_s);
    num("z_down_s", base.z_down_s);
    num("theta_up", base.theta_up);
    num("theta_down", base.theta_down);
    num("epsilon", base.epsilon);
    if (j.contains("deadline_slots")) base.deadline_slots = j.at("deadline_slots").get<std::int64_t>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("block_size_k")) base.block_size_k = j.at("block_size_k").get<std::int64_t>();
    if (j.contains("energy_unit")) base.energy_unit = j.at("energy_unit").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (j.contains("gev_v_up")) base.gev_v_up = gev_from_json(j.at("gev_v_up"));
  if (j.contains("gev_v_down")) base.gev_v_down = gev_from_json(j.at("gev_v_down"));
  validate_params(base);
  return base;
}

}  // namespace mecoff
