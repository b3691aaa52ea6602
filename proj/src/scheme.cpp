#include "lerrw/scheme.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lerrw {

void WalkConfig::validate() const {
  if (!std::isfinite(alpha))
    throw std::invalid_argument("alpha must be finite");
  if (!std::isfinite(delta) || delta < 0.0)
    throw std::invalid_argument("delta must be finite and >= 0, got " +
                                std::to_string(delta));
}

bool WalkConfig::integer_alpha() const noexcept {
  return std::isfinite(alpha) && std::nearbyint(alpha) == alpha;
}

double initial_weight(const WalkConfig& cfg, Vertex x) noexcept {
  if (x == 0) return 1.0;
  if (cfg.alpha == 0.0) return 1.0;
  return std::pow(static_cast<double>(x), cfg.alpha);
}

double scheme_weight(const WalkConfig& cfg, std::uint64_t ell,
                     Vertex x) noexcept {
  return initial_weight(cfg, x) + static_cast<double>(ell) * cfg.delta;
}

std::string_view to_string(Recurrence r) noexcept {
  return r == Recurrence::Recurrent ? "recurrent" : "transient";
}

Classification classify(const WalkConfig& cfg, Vertex cutoff) {
  cfg.validate();
  Classification out;
  out.verdict = cfg.alpha <= 1.0 ? Recurrence::Recurrent : Recurrence::Transient;
  out.cutoff = cutoff;
  double sum = 0.0;
  for (Vertex x = 0; x <= cutoff; ++x) sum += 1.0 / initial_weight(cfg, x);
  out.partial_f0_sum = sum;
  return out;
}

}  // namespace lerrw
