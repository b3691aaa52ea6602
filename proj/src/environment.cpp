#include "lerrw/environment.hpp"

#include "lerrw/analytic.hpp"
#include "lerrw/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace lerrw {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) noexcept {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

LogResistanceStream::LogResistanceStream(const WalkConfig& cfg,
                                         std::uint64_t master_seed)
    : cfg_(cfg), seed_(master_seed) {
  cfg_.validate();
  if (!(cfg_.delta > 0.0))
    throw std::domain_error(
        "sampled environment: the Beta representation requires delta > 0");
}

double LogResistanceStream::next() {
  ++site_;
  const BetaParams bp = beta_params(cfg_, site_);
  Rng rng(seed_, site_);
  draw_ = sample_beta(bp.a, bp.b, rng);
  sum_.add(draw_.log_odds);
  return sum_.value();
}

double LogResistanceStream::advance_to(Vertex x) {
  while (site_ < x) next();
  return sum_.value();
}

BetaParams beta_params(const WalkConfig& cfg, Vertex i) {
  cfg.validate();
  if (!(cfg.delta > 0.0))
    throw std::domain_error("beta_params: requires delta > 0");
  if (i < 1) throw std::domain_error("beta_params: requires i >= 1");
  const double two_d = 2.0 * cfg.delta;
  return {initial_weight(cfg, i) / two_d,
          (initial_weight(cfg, i - 1) + cfg.delta) / two_d};
}

std::string_view to_string(SummabilityVerdict v) noexcept {
  switch (v) {
    case SummabilityVerdict::Summable: return "summable";
    case SummabilityVerdict::Diverges: return "diverges";
    case SummabilityVerdict::Undetermined: break;
  }
  return "undetermined";
}

double NormalizerResult::partial() const { return std::exp(log_partial); }

double HittingBounds::lower() const { return std::exp(log_lower); }
double HittingBounds::upper() const { return std::exp(log_upper); }
std::optional<double> HittingBounds::upper_posrec() const {
  if (!log_upper_posrec) return std::nullopt;
  return std::exp(*log_upper_posrec);
}

Environment Environment::sampled(const WalkConfig& cfg,
                                 std::uint64_t master_seed) {
  Environment env;
  env.stream_.emplace(cfg, master_seed);
  env.cfg_ = cfg;
  env.seed_ = master_seed;
  env.push_site();
  return env;
}

Environment Environment::from_probabilities(std::vector<double> p_from_site_1,
                                            double tail_p) {
  auto check = [](double p) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument(
          "Environment: site probabilities must lie in (0,1)");
  };
  for (double p : p_from_site_1) check(p);
  check(tail_p);
  Environment env;
  env.fixed_p_ = std::move(p_from_site_1);
  env.tail_p_ = tail_p;
  env.push_site();
  return env;
}

void Environment::push_site() {
  const Vertex x = p_.size();
  if (x == 0) {
    p_.push_back(1.0);
    zeta_.push_back(0.0);
    S_.push_back(0.0);
    log_h_.push_back(-kInf);
    log_pi_.push_back(0.0);
    log_pi_cum_.push_back(0.0);
    log_T_.push_back(-kInf);
    max_S_.push_back(-kInf);
    min_S_.push_back(kInf);
    return;
  }

  double p;
  double zeta;
  double s;
  if (stream_) {
    s = stream_->next();
    p = stream_->last_draw().p;
    zeta = stream_->last_draw().log_odds;
  } else {
    p = x <= fixed_p_.size() ? fixed_p_[x - 1] : tail_p_;
    zeta = std::log1p(-p) - std::log(p);
    fixed_sum_.add(zeta);
    s = fixed_sum_.value();
  }
  const double s_prev = S_.back();

  p_.push_back(p);
  zeta_.push_back(zeta);
  S_.push_back(s);

  log_h_.push_back(log_add(log_h_.back(), s_prev));
  const double lpi = log_add(-s_prev, -s);
  log_pi_.push_back(lpi);
  const double lpi_cum_prev = log_pi_cum_.back();
  log_pi_cum_.push_back(log_add(lpi_cum_prev, lpi));
  log_T_.push_back(log_add(log_T_.back(), s_prev + lpi_cum_prev));
  max_S_.push_back(std::max(max_S_.back(), s_prev));
  min_S_.push_back(std::min(min_S_.back(), s_prev));
}

void Environment::extend_to(Vertex x) {
  if (x == std::numeric_limits<Vertex>::max())
    throw std::length_error("Environment::extend_to: horizon too large");
  if (x <= horizon()) return;
  const std::size_t n = static_cast<std::size_t>(x) + 1;
  for (auto* v : {&p_, &zeta_, &S_, &log_h_, &log_pi_, &log_pi_cum_, &log_T_,
                  &max_S_, &min_S_})
    v->reserve(n);
  while (horizon() < x) push_site();
}

void Environment::require(Vertex x, const char* what) const {
  if (x > horizon())
    throw std::out_of_range(std::string(what) + ": site " + std::to_string(x) +
                            " beyond materialized horizon " +
                            std::to_string(horizon()));
}

SummabilityVerdict Environment::summability() const noexcept {
  if (!cfg_) return SummabilityVerdict::Undetermined;
  return normalizer_summable(*cfg_) ? SummabilityVerdict::Summable
                                    : SummabilityVerdict::Diverges;
}

double Environment::p(Vertex i) const {
  require(i, "p");
  return p_[i];
}
double Environment::p(Vertex i) {
  extend_to(i);
  return std::as_const(*this).p(i);
}

double Environment::log_odds(Vertex i) const {
  require(i, "log_odds");
  return zeta_[i];
}
double Environment::log_odds(Vertex i) {
  extend_to(i);
  return std::as_const(*this).log_odds(i);
}

double Environment::log_resistance(Vertex x) const {
  require(x, "log_resistance");
  return S_[x];
}
double Environment::log_resistance(Vertex x) {
  extend_to(x);
  return std::as_const(*this).log_resistance(x);
}
double Environment::resistance(Vertex x) const {
  return std::exp(log_resistance(x));
}
double Environment::resistance(Vertex x) {
  return std::exp(log_resistance(x));
}

double Environment::log_harmonic(Vertex x) const {
  require(x, "harmonic");
  return log_h_[x];
}
double Environment::log_harmonic(Vertex x) {
  extend_to(x);
  return std::as_const(*this).log_harmonic(x);
}
double Environment::harmonic(Vertex x) const {
  return std::exp(log_harmonic(x));
}
double Environment::harmonic(Vertex x) { return std::exp(log_harmonic(x)); }

double Environment::log_reversible_mass(Vertex x) const {
  require(x, "reversible_mass");
  return log_pi_[x];
}
double Environment::log_reversible_mass(Vertex x) {
  extend_to(x);
  return std::as_const(*this).log_reversible_mass(x);
}
double Environment::reversible_mass(Vertex x) const {
  return std::exp(log_reversible_mass(x));
}
double Environment::reversible_mass(Vertex x) {
  return std::exp(log_reversible_mass(x));
}

NormalizerResult Environment::normalizer(Vertex cutoff) const {
  require(cutoff, "normalizer");
  return {cutoff, log_pi_cum_[cutoff], summability()};
}
NormalizerResult Environment::normalizer(Vertex cutoff) {
  extend_to(cutoff);
  return std::as_const(*this).normalizer(cutoff);
}

double Environment::log_expected_hitting_time(Vertex x) const {
  require(x, "expected_hitting_time");
  return log_T_[x];
}
double Environment::log_expected_hitting_time(Vertex x) {
  extend_to(x);
  return std::as_const(*this).log_expected_hitting_time(x);
}
double Environment::expected_hitting_time(Vertex x) const {
  return std::exp(log_expected_hitting_time(x));
}
double Environment::expected_hitting_time(Vertex x) {
  return std::exp(log_expected_hitting_time(x));
}

HittingBounds Environment::hitting_bounds(Vertex x, Vertex z_cutoff) const {
  if (x < 1) throw std::domain_error("hitting_bounds: requires x >= 1");
  const Vertex cutoff = std::max(z_cutoff, x - 1);
  require(std::max(x, cutoff), "hitting_bounds");
  HittingBounds out;
  out.log_lower = std::max(log_h_[x], max_S_[x]);
  const double xd = static_cast<double>(x);
  out.log_upper = std::log(2.0 * xd * xd) + max_S_[x] - min_S_[x];
  if (summability() == SummabilityVerdict::Summable)
    out.log_upper_posrec = log_pi_cum_[cutoff] + log_h_[x];
  return out;
}
HittingBounds Environment::hitting_bounds(Vertex x, Vertex z_cutoff) {
  if (x >= 1) extend_to(std::max(x, std::max(z_cutoff, x - 1)));
  return std::as_const(*this).hitting_bounds(x, z_cutoff);
}

void Environment::write_csv(std::ostream& os, Vertex upto) {
  extend_to(upto);
  os << "i,p_i,S_i,h_i,T_i\n";
  char line[160];
  for (Vertex i = 0; i <= upto; ++i) {
    std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(i), p_[i], S_[i],
                  std::exp(log_h_[i]), std::exp(log_T_[i]));
    os << line;
  }
}

}  // namespace lerrw
