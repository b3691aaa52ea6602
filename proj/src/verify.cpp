#include "lerrw/analytic.hpp"
#include "lerrw/environment.hpp"
#include "lerrw/harness.hpp"
#include "lerrw/oracle.hpp"
#include "lerrw/simd/kernels.hpp"
#include "lerrw/simulator.hpp"
#include "lerrw/special_functions.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace lerrw {
namespace {

constexpr double kLn4 = 1.3862943611198906;

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const double steps = std::round(std::log10(hi / lo) * per_decade);
  for (int k = 0; k <= static_cast<int>(steps); ++k)
    g.push_back(lo * std::pow(10.0, k / static_cast<double>(per_decade)));
  return g;
}

// Measured value must not exceed threshold.
CheckResult at_most(std::string name, double measured, double threshold,
                    std::string detail = {}) {
  return {std::move(name), measured <= threshold, measured, threshold,
          std::move(detail)};
}

const WalkConfig kOracleGrid[] = {
    {0, 0.5}, {0, 1}, {0, 2}, {1, 0.5}, {1, 1}, {1, 2},
    {-1, 0.5}, {-1, 1}, {-1, 2}, {2, 0.5}, {2, 1}, {2, 2},
};

void special_function_checks(const ToleranceProfile& tol,
                             std::vector<CheckResult>& out) {
  const auto grid = log_grid(1e-4, 1e4, 8);
  // Residuals are scaled by max(1, |f(z)|): trigamma(1e-4) is 1e8, so an
  // absolute 1e-10 is below its ulp.
  double rec = 0.0;
  auto residual = [&](double r, double scale) {
    rec = std::max(rec, std::abs(r) / std::max(1.0, std::abs(scale)));
  };
  for (double z : grid) {
    residual(digamma(z + 1) - digamma(z) - 1 / z, digamma(z));
    residual(trigamma(z + 1) - trigamma(z) + 1 / (z * z), trigamma(z));
    residual(log_gamma(z + 1) - log_gamma(z) - std::log(z), log_gamma(z));
  }
  out.push_back(at_most("special.recurrences", rec, tol.special_functions,
                        "max scaled residual on z in [1e-4, 1e4]"));

  // Bounds from the digamma/trigamma series; measured = worst violation.
  double worst = -1.0;
  auto track = [&](double lhs, double rhs) { worst = std::max(worst, lhs - rhs); };
  for (double z : grid) {
    const double t = trigamma(z);
    const double d = digamma(z + 0.5) - digamma(z);
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    track(1 / (z * z) + 1 / (z + 1) - slack, t);
    track(t, 1 / (z * z) + 1 / z + slack);
    const double ds = 1e-12 * std::max(1.0, std::abs(d));
    track(d, 1 / z + ds);
    track(d, 1 / (2 * z) + 1 / (2 * z * z) + ds);
    track(1 / (z * (2 * z + 1)) - ds, d);
    if (z >= 0.5) track(1 / (2 * z) - ds, d);
  }
  const auto coarse = log_grid(1e-3, 1e3, 3);
  for (double s : coarse)
    for (double t : coarse) {
      const double diff = digamma(t) - digamma(s);
      const double ls = std::log(t) - std::log(s);
      const double sl = 1e-12 * std::max({1.0, std::abs(diff), 1 / s, 1 / t});
      track(ls - 1 / t - sl, diff);
      track(diff, ls + 1 / s + sl);
    }
  out.push_back({"special.inequality_grid", worst <= 0.0, worst, 0.0,
                 "largest (lhs - rhs) over all bound instances"});

  out.push_back(at_most("special.digamma_identity",
                        std::abs(digamma(1.0) - digamma(0.5) - kLn4), 1e-12,
                        "|digamma(1) - digamma(1/2) - ln 4|"));

  double rel = 0.0;
  for (double z : log_grid(1e-6, 1e6, 4)) {
    for (const auto& r : {digamma_e(z), trigamma_e(z), log_gamma_e(z)})
      rel = std::max(rel, r.estimated_abs_error / std::max(1.0, std::abs(r.value)));
  }
  out.push_back(at_most("special.error_estimate", rel, tol.special_functions,
                        "max estimated_abs_error / max(1,|value|) on [1e-6, 1e6]"));

  if (simd::isa_available(simd::Isa::Avx2)) {
    const auto saved = simd::active_isa();
    std::vector<double> z = log_grid(1e-6, 1e6, 20);
    std::vector<double> a(z.size()), b(z.size());
    simd::set_active_isa(simd::Isa::Scalar);
    simd::digamma_batch(z, a);
    simd::set_active_isa(simd::Isa::Avx2);
    simd::digamma_batch(z, b);
    simd::set_active_isa(saved);
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      d = std::max(d, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
    out.push_back(at_most("simd.digamma_equivalence", d, 1e-13,
                          "max relative gap, AVX2 vs scalar"));
  }
}

void analytic_checks(std::vector<CheckResult>& out) {
  out.push_back(at_most("analytic.k_constant",
                        std::abs(k_constant(0, 1) - 1 / kLn4), 1e-12,
                        "|K(0,1) - 1/ln 4|"));
  double tele = 0.0;
  for (double a : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0})
    for (double d : {0.5, 1.0, 2.0})
      for (Vertex x : {1u, 10u, 100u, 1000u, 10000u}) {
        const WalkConfig c{a, d};
        const double m = mean_S(c, x);
        tele = std::max(tele, std::abs(m - mean_S_telescoped(c, x)) / std::max(1.0, std::abs(m)));
      }
  out.push_back(at_most("analytic.telescoping", tele, 1e-9,
                        "max |direct - telescoped| / max(1,|E[S_x]|), x <= 1e4"));
  out.push_back(at_most("analytic.mean_ln4",
                        std::abs(mean_S({1, 1}, 50) - kLn4), 1e-12,
                        "|E[S_50] - ln 4| at alpha = delta = 1"));
}

void oracle_checks(const ToleranceProfile& tol, std::vector<CheckResult>& out) {
  double tv_exact = 0.0, tv_float = 0.0, dev_exact = 0.0, dev_float = 0.0;
  double drift = -1.0, s_form = 0.0, def = 0.0;
  std::uint64_t parity = 0, at_max = 0;
  for (const auto& c : kOracleGrid)
    for (unsigned n = 1; n <= tol.max_depth; ++n) {
      tv_exact = std::max(tv_exact, equivalence_distance(c, n).value);
      tv_float = std::max(tv_float, equivalence_distance(c, n, ArithmeticMode::Float).value);
      for (auto mode : {ArithmeticMode::Auto, ArithmeticMode::Float}) {
        const auto r = martingale_check(c, n, mode);
        (r.exact ? dev_exact : dev_float) =
            std::max(r.exact ? dev_exact : dev_float, r.max_deviation);
        if (r.exact) {
          drift = std::max(drift, r.max_m_drift);
          s_form = std::max(s_form, r.max_s_form_error);
          def = std::max(def, r.max_definition_error);
          parity += r.parity_violations;
          at_max += r.truncated_form_mismatches_at_max;
        }
      }
    }
  out.push_back(at_most("oracle.equivalence_exact", tv_exact, 0.0,
                        "TV distance, rational arithmetic"));
  out.push_back(at_most("oracle.equivalence_float", tv_float, tol.equivalence,
                        "TV distance, double arithmetic"));
  out.push_back(at_most("oracle.martingale_exact", dev_exact, 0.0,
                        "max |E[Theta_{m+1}|node] - Theta_m|, rational"));
  out.push_back(at_most("oracle.martingale_float", dev_float, tol.martingale,
                        "same, double arithmetic"));
  out.push_back(at_most("oracle.m_supermartingale", drift, 0.0,
                        "max E[M_{m+1}|node] - M_m"));
  out.push_back(at_most("oracle.theta_s_form", std::max(s_form, def), 0.0,
                        "Theta vs alternating-sum form and vs definition"));
  out.push_back(at_most("oracle.parity",
                        static_cast<double>(parity + at_max), 0.0,
                        "even counts below X_m before return, plus truncated-form "
                        "mismatches at the running maximum"));

  double chain = 0.0;  // worst violation of s_2k <= s_2k+2 <= s_2k+1 <= s_2k-1
  bool certified = true;
  double margin = 1e300;
  for (double a : {-1.0, 0.0, 0.5, 1.0})
    for (double d : {0.5, 1.0, 2.0, 5.0})
      for (Vertex x = 0; x <= 100; ++x) {
        const WalkConfig c{a, d};
        const auto s = s_values(c, x, 41);
        for (std::size_t k = 1; 2 * k + 2 <= 40; ++k) {
          chain = std::max(chain, s[2 * k] - s[2 * k + 2]);
          chain = std::max(chain, s[2 * k + 2] - s[2 * k + 1]);
          chain = std::max(chain, s[2 * k + 1] - s[2 * k - 1]);
        }
        const auto cert = certify_s_inf_claim(c, x);
        certified = certified && cert.certified;
        margin = std::min(margin, cert.bracket.lower - cert.bound);
      }
  out.push_back(at_most("oracle.s_interleaving", chain, 0.0,
                        "worst violation of the even/odd interleaving"));
  out.push_back({"oracle.s_inf_claim", certified, margin, 0.0,
                 "min (s_2k - 1/(2f(0,x)+delta)) at the certifying k, x <= 100"});
}

void environment_checks(const ToleranceProfile& tol, std::vector<CheckResult>& out) {
  double sandwich = -1e300;
  double rel = 0.0;
  for (double a : {0.0, 0.5, 1.0})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const WalkConfig c{a, 1.0};
      Environment env = Environment::sampled(c, seed);
      env.extend_to(1000);
      const Environment& v = env;
      for (Vertex x = 1; x <= 1000; ++x) {
        const auto b = v.hitting_bounds(x, x - 1);
        const double lt = v.log_expected_hitting_time(x);
        const double slack = 1e-12 * std::max(1.0, std::abs(lt));
        sandwich = std::max({sandwich, b.log_lower - lt - slack, lt - b.log_upper - slack});
      }
      // Mean crossing times d_i = E_i[tau_{i+1}] satisfy d_0 = 1 and
      // d_i = (1 + q_i d_{i-1}) / p_i; T(x) = sum_{i<x} d_i.
      long double log_d = 0.0L;
      long double log_t = 0.0L;
      for (Vertex i = 1; i <= 200; ++i) {
        const long double lp = std::log(static_cast<long double>(v.p(i)));
        const long double lq = lp + v.log_odds(i);
        const long double u = lq + log_d;
        log_d = (u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u))) - lp;
        const long double hi = std::max(log_t, log_d);
        log_t = hi + std::log(std::exp(log_t - hi) + std::exp(log_d - hi));
        const double lt = v.log_expected_hitting_time(i + 1);
        rel = std::max(rel, static_cast<double>(std::abs(std::expm1(static_cast<long double>(lt) - log_t))));
      }
    }
  out.push_back(at_most("environment.sandwich", sandwich, 0.0,
                        "max log-violation of lower <= T <= upper, x <= 1000"));
  out.push_back(at_most("environment.hitting_recursion", rel, tol.hitting_relative,
                        "max relative gap to the crossing-time recursion, x <= 201"));

  Environment forward = Environment::sampled({-0.5, 1.0}, 77);
  Environment backward = Environment::sampled({-0.5, 1.0}, 77);
  (void)backward.p(500);
  double gap = 0.0;
  for (Vertex i = 500; i-- > 0;) (void)backward.p(i);
  forward.extend_to(500);
  for (Vertex i = 0; i <= 500; ++i)
    gap = std::max(gap, std::abs(forward.log_resistance(i) - backward.log_resistance(i)));
  out.push_back(at_most("environment.determinism", gap, 0.0,
                        "S_x gap between query orders"));
}

void simulator_checks(std::vector<CheckResult>& out) {
  std::uint64_t mismatches = 0;
  for (const auto& c : kOracleGrid) {
    Rng r1(5), r2(5);
    WalkState s;
    LerrwWalker w(c);
    for (int k = 0; k < 20000; ++k)
      if (lerrw_step(c, s, r1) != w.step(r2)) ++mismatches;
    std::uint64_t total = 0;
    for (auto v : s.phi) total += v;
    if (total != s.n) ++mismatches;
  }
  out.push_back(at_most("simulator.kernel_agreement", static_cast<double>(mismatches), 0.0,
                        "step mismatches between reference and cached walker, "
                        "plus count-conservation failures"));
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["passed"] = passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["measured"] = c.measured;
    e["threshold"] = c.threshold;
    e["margin"] = c.threshold - c.measured;
    e["detail"] = c.detail;
    j["checks"].push_back(std::move(e));
  }
  return j.dump(2);
}

VerifyReport verify_all(const ToleranceProfile& profile) {
  VerifyReport r;
  special_function_checks(profile, r.checks);
  analytic_checks(r.checks);
  oracle_checks(profile, r.checks);
  environment_checks(profile, r.checks);
  simulator_checks(r.checks);
  return r;
}

}  // namespace lerrw
