#include "lerrw/oracle.hpp"

#include "lerrw/special_functions.hpp"

#include <gmpxx.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lerrw {
namespace {

constexpr double kMaxExactAlpha = 64.0;

double to_double(double v) { return v; }
double to_double(const mpq_class& v) { return v.get_d(); }

double abs_value(double v) { return std::abs(v); }
mpq_class abs_value(const mpq_class& v) { return abs(v); }

bool differs(double a, double b) {
  return std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b));
}
bool differs(const mpq_class& a, const mpq_class& b) { return a != b; }

std::string rational_string(const mpq_class& v) {
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

template <class Num>
class Weights;

template <>
class Weights<double> {
 public:
  explicit Weights(const WalkConfig& cfg) : cfg_(cfg) {}
  double f0(Vertex x) const { return initial_weight(cfg_, x); }
  double delta() const { return cfg_.delta; }
  double f(std::uint64_t ell, Vertex x) const {
    return scheme_weight(cfg_, ell, x);
  }

 private:
  WalkConfig cfg_;
};

template <>
class Weights<mpq_class> {
 public:
  explicit Weights(const WalkConfig& cfg)
      : power_(static_cast<long>(cfg.alpha)), delta_(cfg.delta) {}
  mpq_class f0(Vertex x) const {
    if (x == 0 || power_ == 0) return 1;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(x),
                  static_cast<unsigned long>(power_ < 0 ? -power_ : power_));
    if (power_ > 0) return mpq_class(p);
    mpq_class r(mpz_class(1), p);
    r.canonicalize();
    return r;
  }
  const mpq_class& delta() const { return delta_; }
  mpq_class f(std::uint64_t ell, Vertex x) const {
    return f0(x) + mpq_class(mpz_class(static_cast<unsigned long>(ell))) * delta_;
  }

 private:
  long power_;
  mpq_class delta_;  // exact binary value of the double
};

void check_depth(unsigned n, unsigned max_n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
  if (n > max_n)
    throw std::length_error(std::string(what) + ": n = " + std::to_string(n) +
                            " exceeds the limit " + std::to_string(max_n));
}

// ---- enumeration -----------------------------------------------------------

template <class Num>
struct Enumerator {
  const Weights<Num>& w;
  unsigned n;
  std::vector<std::uint64_t> phi;
  std::vector<std::pair<std::uint32_t, Num>> leaves;

  void run(unsigned depth, Vertex pos, std::uint32_t moves, const Num& prob) {
    if (depth == n) {
      leaves.emplace_back(moves, prob);
      return;
    }
    if (pos == 0) {
      ++phi[0];
      run(depth + 1, 1, moves | (1u << depth), prob);
      --phi[0];
      return;
    }
    const Num right = w.f(phi[pos], pos);
    const Num left = w.f(phi[pos - 1], pos - 1);
    const Num total = left + right;
    ++phi[pos];
    run(depth + 1, pos + 1, moves | (1u << depth), Num(prob * right / total));
    --phi[pos];
    ++phi[pos - 1];
    run(depth + 1, pos - 1, moves, Num(prob * left / total));
    --phi[pos - 1];
  }
};

template <class Num>
std::vector<std::pair<std::uint32_t, Num>> enumerate_leaves(
    const WalkConfig& cfg, unsigned n) {
  Weights<Num> w(cfg);
  Enumerator<Num> e{w, n, std::vector<std::uint64_t>(n + 1, 0), {}};
  e.run(0, 0, 0, Num(1));
  std::sort(e.leaves.begin(), e.leaves.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return std::move(e.leaves);
}

// ---- annealed law ------------------------------------------------------------

struct MoveCounts {
  std::vector<std::uint64_t> up;
  std::vector<std::uint64_t> down;
};

MoveCounts count_moves(std::uint32_t moves, unsigned n) {
  MoveCounts c{std::vector<std::uint64_t>(n + 1, 0),
               std::vector<std::uint64_t>(n + 1, 0)};
  Vertex pos = 0;
  for (unsigned k = 0; k < n; ++k) {
    if (moves >> k & 1u) {
      ++c.up[pos];
      ++pos;
    } else {
      ++c.down[pos];
      --pos;
    }
  }
  return c;
}

mpq_class rising(const mpq_class& a, std::uint64_t k) {
  mpq_class r = 1;
  for (std::uint64_t j = 0; j < k; ++j)
    r *= a + mpq_class(mpz_class(static_cast<unsigned long>(j)));
  return r;
}

mpq_class annealed_exact(const Weights<mpq_class>& w, std::uint32_t moves,
                         unsigned n) {
  const MoveCounts c = count_moves(moves, n);
  const mpq_class two_d = 2 * w.delta();
  mpq_class prob = 1;
  for (Vertex i = 1; i <= n; ++i) {
    const std::uint64_t u = c.up[i];
    const std::uint64_t d = c.down[i];
    if (u + d == 0) continue;
    mpq_class a = w.f0(i) / two_d;
    mpq_class b = (w.f0(i - 1) + w.delta()) / two_d;
    prob *= rising(a, u) * rising(b, d) / rising(mpq_class(a + b), u + d);
  }
  return prob;
}

double annealed_float(const WalkConfig& cfg, std::uint32_t moves, unsigned n) {
  const MoveCounts c = count_moves(moves, n);
  const double two_d = 2.0 * cfg.delta;
  double log_prob = 0.0;
  for (Vertex i = 1; i <= n; ++i) {
    const auto u = static_cast<double>(c.up[i]);
    const auto d = static_cast<double>(c.down[i]);
    if (u + d == 0.0) continue;
    const double a = initial_weight(cfg, i) / two_d;
    const double b = (initial_weight(cfg, i - 1) + cfg.delta) / two_d;
    log_prob += log_beta(a + u, b + d) - log_beta(a, b);
  }
  return std::exp(log_prob);
}

void require_reinforced(const WalkConfig& cfg, const char* what) {
  cfg.validate();
  if (!(cfg.delta > 0.0))
    throw std::domain_error(std::string(what) +
                            ": the Beta mixture requires delta > 0");
}

}  // namespace

bool resolve_exact(const WalkConfig& cfg, ArithmeticMode mode) {
  const bool representable =
      cfg.integer_alpha() && std::abs(cfg.alpha) <= kMaxExactAlpha;
  switch (mode) {
    case ArithmeticMode::Float: return false;
    case ArithmeticMode::Auto: return representable;
    case ArithmeticMode::Exact:
      if (!representable)
        throw std::invalid_argument(
            "exact arithmetic needs an integer alpha with |alpha| <= 64");
      return true;
  }
  return false;
}

double PathDistribution::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.probability.value;
  return s;
}

std::optional<std::string> PathDistribution::exact_total() const {
  if (!exact) return std::nullopt;
  mpq_class s = 0;
  for (const auto& e : entries) s += mpq_class(*e.probability.exact);
  s.canonicalize();
  return s.get_den() == 1 ? s.get_num().get_str() : rational_string(s);
}

const PathEntry* PathDistribution::find(const Path& path) const {
  if (path.size() != horizon + 1) return nullptr;
  const std::uint32_t m = encode_path(path);
  auto it = std::lower_bound(
      entries.begin(), entries.end(), m,
      [](const PathEntry& e, std::uint32_t v) { return e.moves < v; });
  return it != entries.end() && it->moves == m ? &*it : nullptr;
}

Path decode_path(std::uint32_t moves, unsigned horizon) {
  Path p{0};
  for (unsigned k = 0; k < horizon; ++k)
    p.push_back(moves >> k & 1u ? p.back() + 1 : p.back() - 1);
  return p;
}

std::uint32_t encode_path(const Path& path) {
  if (path.empty() || path.front() != 0)
    throw std::domain_error("path must start at 0");
  if (path.size() > 33) throw std::domain_error("path longer than 32 steps");
  std::uint32_t m = 0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path[k] == path[k - 1] + 1)
      m |= 1u << (k - 1);
    else if (!(path[k - 1] > 0 && path[k] == path[k - 1] - 1))
      throw std::domain_error("path must move by +-1 and stay >= 0");
  }
  return m;
}

std::string path_string(const Path& path) {
  std::string s;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(path[k]);
  }
  return s;
}

PathDistribution enumerate_lerrw(const WalkConfig& cfg, unsigned n,
                                 ArithmeticMode mode) {
  cfg.validate();
  check_depth(n, kMaxEnumerationDepth, "enumerate_lerrw");
  PathDistribution out;
  out.horizon = n;
  out.exact = resolve_exact(cfg, mode);
  if (out.exact) {
    for (auto& [m, p] : enumerate_leaves<mpq_class>(cfg, n))
      out.entries.push_back({m, {p.get_d(), rational_string(p)}});
  } else {
    for (auto& [m, p] : enumerate_leaves<double>(cfg, n))
      out.entries.push_back({m, {p, std::nullopt}});
  }
  return out;
}

PathProbability annealed_path_prob(const WalkConfig& cfg, const Path& path,
                                   ArithmeticMode mode) {
  require_reinforced(cfg, "annealed_path_prob");
  const std::uint32_t m = encode_path(path);
  const auto n = static_cast<unsigned>(path.size() - 1);
  if (resolve_exact(cfg, mode)) {
    const mpq_class p = annealed_exact(Weights<mpq_class>(cfg), m, n);
    return {p.get_d(), rational_string(p)};
  }
  return {annealed_float(cfg, m, n), std::nullopt};
}

DistanceResult equivalence_distance(const WalkConfig& cfg, unsigned n,
                                    ArithmeticMode mode) {
  require_reinforced(cfg, "equivalence_distance");
  check_depth(n, kMaxEnumerationDepth, "equivalence_distance");
  DistanceResult out;
  out.exact = resolve_exact(cfg, mode);
  if (out.exact) {
    const Weights<mpq_class> w(cfg);
    mpq_class l1 = 0;
    for (const auto& [m, p] : enumerate_leaves<mpq_class>(cfg, n))
      l1 += abs(p - annealed_exact(w, m, n));
    out.value = mpq_class(l1 / 2).get_d();
  } else {
    double l1 = 0.0;
    for (const auto& [m, p] : enumerate_leaves<double>(cfg, n))
      l1 += std::abs(p - annealed_float(cfg, m, n));
    out.value = l1 / 2.0;
  }
  return out;
}

void write_path_distribution_json(std::ostream& os,
                                  const PathDistribution& dist) {
  nlohmann::ordered_json j;
  j["horizon"] = dist.horizon;
  j["exact"] = dist.exact;
  nlohmann::ordered_json paths = nlohmann::ordered_json::object();
  for (const auto& e : dist.entries) {
    nlohmann::ordered_json v;
    v["probability"] = e.probability.value;
    if (e.probability.exact) v["exact"] = *e.probability.exact;
    paths[path_string(decode_path(e.moves, dist.horizon))] = std::move(v);
  }
  j["paths"] = std::move(paths);
  os << j.dump(2) << '\n';
}

// ---- alternating sums --------------------------------------------------------

std::vector<double> s_values(const WalkConfig& cfg, Vertex x,
                             std::uint64_t j_max) {
  cfg.validate();
  if (j_max < 1) throw std::invalid_argument("s_values: j_max must be >= 1");
  std::vector<double> s(j_max + 1, 0.0);
  for (std::uint64_t j = 1; j <= j_max; ++j) {
    const double term = 1.0 / scheme_weight(cfg, j - 1, x);
    s[j] = (j - 1) % 2 == 0 ? s[j - 1] + term : s[j - 1] - term;
  }
  return s;
}

SBracket s_inf_bracket(const WalkConfig& cfg, Vertex x, std::uint64_t k) {
  cfg.validate();
  if (k < 1) throw std::invalid_argument("s_inf_bracket: k must be >= 1");
  // s_{2k} = sum_{m<k} (1/f(2m) - 1/f(2m+1)) = sum_m delta / (f(2m) f(2m+1)).
  const double f0 = initial_weight(cfg, x);
  const double d = cfg.delta;
  double sum = 0.0;
  double comp = 0.0;
  for (std::uint64_t m = 0; m < k; ++m) {
    const double lo = f0 + static_cast<double>(2 * m) * d;
    const double term = d / (lo * (lo + d));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return {k, sum, sum + 1.0 / (f0 + static_cast<double>(2 * k) * d)};
}

double s_inf_lower_bound(const WalkConfig& cfg, Vertex x) {
  cfg.validate();
  return 1.0 / (2.0 * initial_weight(cfg, x) + cfg.delta);
}

SClaimCertificate certify_s_inf_claim(const WalkConfig& cfg, Vertex x,
                                      std::uint64_t k_max) {
  require_reinforced(cfg, "certify_s_inf_claim");
  SClaimCertificate out;
  out.bound = s_inf_lower_bound(cfg, x);
  for (std::uint64_t k = 1; k <= k_max; k *= 2) {
    out.bracket = s_inf_bracket(cfg, x, k);
    if (out.bracket.lower >= out.bound) {
      out.certified = true;
      break;
    }
  }
  return out;
}

// ---- Theta martingale --------------------------------------------------------

namespace {

template <class Num>
struct ThetaState {
  ThetaState(const Weights<Num>& weights, std::size_t edges)
      : w(weights), phi(edges, 0) {}

  const Weights<Num>& w;
  std::vector<std::uint64_t> phi;
  Vertex pos = 0;
  std::uint64_t n = 0;
  bool returned = false;
  std::optional<std::uint64_t> return_time;
  Num theta = 0;       // by increments
  Num correction = 0;  // sum of 1/w_m(X_m) - 1/w_{m+1}(X_m) on up moves

  Num weight(Vertex x) const { return w.f(phi[x], x); }

  Num m_value() const {
    Num m = 0;
    if (returned) return m;
    for (Vertex x = 0; x < pos; ++x) m += Num(1) / weight(x);
    return m;
  }

  // sum_{x < upto} s_{phi(x)}(x).
  Num s_form(Vertex upto) const {
    Num total = 0;
    for (Vertex x = 0; x < upto; ++x)
      for (std::uint64_t l = 0; l < phi[x]; ++l) {
        const Num term = Num(1) / w.f(l, x);
        if (l % 2 == 0)
          total += term;
        else
          total -= term;
      }
    return total;
  }

  Vertex traversed() const {
    Vertex top = 0;
    while (top < phi.size() && phi[top] > 0) ++top;
    return top;
  }

  bool parity_ok() const {
    for (Vertex x = 0; x < pos; ++x)
      if (phi[x] % 2 == 0) return false;
    return true;
  }

  // Takes one step; returns what is needed to undo it.
  struct Undo {
    Vertex pos;
    bool returned;
    std::optional<std::uint64_t> return_time;
    Num theta;
    Num correction;
  };

  Undo move(int dir) {
    Undo u{pos, returned, return_time, theta, correction};
    if (dir > 0) {
      if (!returned) {
        const Num before = weight(pos);
        ++phi[pos];
        const Num after = weight(pos);
        theta += Num(1) / before;
        correction += Num(1) / before - Num(1) / after;
      } else {
        ++phi[pos];
      }
      ++pos;
    } else {
      --pos;
      if (!returned) theta -= Num(1) / weight(pos);
      ++phi[pos];
      if (pos == 0 && !returned) {
        returned = true;
        return_time = n + 1;
      }
    }
    ++n;
    return u;
  }

  void undo(int dir, const Undo& u) {
    --n;
    if (dir > 0)
      --phi[u.pos];
    else
      --phi[u.pos - 1];
    pos = u.pos;
    returned = u.returned;
    return_time = u.return_time;
    theta = u.theta;
    correction = u.correction;
  }
};

template <class Num>
struct MaxTracker {
  Num deviation = 0;
  Num m_drift = 0;
  bool m_drift_set = false;
  Num s_form_error = 0;
  Num definition_error = 0;
};

template <class Num>
void martingale_dfs(ThetaState<Num>& st, unsigned n_max,
                    MartingaleReport& report, MaxTracker<Num>& mx) {
  const Num m_now = st.m_value();
  mx.definition_error =
      std::max(mx.definition_error, abs_value(Num(st.theta - (m_now + st.correction))));
  if (!st.returned) {
    ++report.pre_return_nodes;
    mx.s_form_error = std::max(
        mx.s_form_error, abs_value(Num(st.theta - st.s_form(st.traversed()))));
    if (differs(st.s_form(st.pos), st.theta)) {
      ++report.truncated_form_mismatches;
      if (st.traversed() == st.pos) ++report.truncated_form_mismatches_at_max;
    }
    if (!st.parity_ok()) ++report.parity_violations;
  }
  if (st.n == n_max) return;
  if (st.returned) {
    // Theta and M are frozen from here on.
    if (st.n >= 1) {
      ++report.nodes_checked;
      if (!mx.m_drift_set) {
        mx.m_drift = 0;
        mx.m_drift_set = true;
      }
    }
    return;
  }

  const Vertex x = st.pos;
  Num p_up = 1;
  if (x > 0) {
    const Num right = st.weight(x);
    const Num left = st.weight(x - 1);
    p_up = right / (left + right);
  }
  const Num theta_now = st.theta;

  Num e_theta = 0;
  Num e_m = 0;
  auto u = st.move(+1);
  e_theta += p_up * st.theta;
  e_m += p_up * st.m_value();
  martingale_dfs(st, n_max, report, mx);
  st.undo(+1, u);
  if (x > 0) {
    const Num p_down = Num(1) - p_up;
    auto d = st.move(-1);
    e_theta += p_down * st.theta;
    e_m += p_down * st.m_value();
    martingale_dfs(st, n_max, report, mx);
    st.undo(-1, d);
  }

  if (st.n >= 1) {
    ++report.nodes_checked;
    mx.deviation = std::max(mx.deviation, abs_value(Num(e_theta - theta_now)));
    const Num drift = e_m - m_now;
    if (!mx.m_drift_set || drift > mx.m_drift) {
      mx.m_drift = drift;
      mx.m_drift_set = true;
    }
  }
}

template <class Num>
void run_martingale(const WalkConfig& cfg, unsigned n, MartingaleReport& r) {
  const Weights<Num> w(cfg);
  ThetaState<Num> st(w, n + 2);
  MaxTracker<Num> mx;
  martingale_dfs(st, n, r, mx);
  r.max_deviation = to_double(mx.deviation);
  r.max_m_drift = to_double(mx.m_drift);
  r.max_s_form_error = to_double(mx.s_form_error);
  r.max_definition_error = to_double(mx.definition_error);
}

}  // namespace

PathFunctionals theta_along(const WalkConfig& cfg, const Path& path) {
  cfg.validate();
  (void)encode_path(path);
  if (path.size() > kMaxMartingaleDepth + 1)
    throw std::length_error("theta_along: path longer than 16 steps");
  const Weights<double> w(cfg);
  ThetaState<double> st(w, path.size() + 1);
  for (std::size_t k = 1; k < path.size(); ++k)
    st.move(path[k] > path[k - 1] ? +1 : -1);
  PathFunctionals out;
  out.theta = st.theta;
  out.m_value = st.m_value();
  out.theta_from_definition = out.m_value + st.correction;
  if (!st.returned) {
    out.theta_s_form = st.s_form(st.traversed());
    out.theta_s_form_truncated = st.s_form(st.pos);
  }
  out.return_time = st.return_time;
  out.phi.assign(st.phi.begin(), st.phi.end());
  while (!out.phi.empty() && out.phi.back() == 0) out.phi.pop_back();
  return out;
}

MartingaleReport martingale_check(const WalkConfig& cfg, unsigned n,
                                  ArithmeticMode mode) {
  cfg.validate();
  check_depth(n, kMaxMartingaleDepth, "martingale_check");
  MartingaleReport r;
  r.depth = n;
  r.exact = resolve_exact(cfg, mode);
  if (r.exact)
    run_martingale<mpq_class>(cfg, n, r);
  else
    run_martingale<double>(cfg, n, r);
  return r;
}

}  // namespace lerrw
