#pragma once

// Exact ground truth at desk scale: the reinforced walk's path law by full
// enumeration, the Beta-mixture path law in closed form, the Theta
// martingale built from reciprocal edge weights, and its alternating
// building blocks s_j(x).
//
// Exact mode uses GMP rationals. It needs every weight to be rational,
// which holds for integer alpha (delta, a double, is always a dyadic
// rational). Float mode uses doubles throughout.

#include "lerrw/scheme.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lerrw {

enum class ArithmeticMode { Auto, Exact, Float };

/// A path i_0 = 0, i_1, ..., i_n.
using Path = std::vector<Vertex>;

inline constexpr unsigned kMaxEnumerationDepth = 20;
inline constexpr unsigned kMaxMartingaleDepth = 16;

/// Whether `mode` resolves to exact arithmetic for cfg. Throws
/// std::invalid_argument if Exact is requested for non-integer alpha.
[[nodiscard]] bool resolve_exact(const WalkConfig& cfg, ArithmeticMode mode);

struct PathProbability {
  double value = 0.0;
  /// "num/den" in lowest terms, exact mode only.
  std::optional<std::string> exact;
};

struct PathEntry {
  /// Bit k set when step k+1 goes up.
  std::uint32_t moves = 0;
  PathProbability probability;
};

struct PathDistribution {
  unsigned horizon = 0;
  bool exact = false;
  /// Ordered by `moves`.
  std::vector<PathEntry> entries;

  [[nodiscard]] double total() const;
  /// "1" in exact mode when the probabilities add up to exactly one.
  [[nodiscard]] std::optional<std::string> exact_total() const;
  [[nodiscard]] const PathEntry* find(const Path& path) const;
};

[[nodiscard]] Path decode_path(std::uint32_t moves, unsigned horizon);
/// Throws std::domain_error unless path starts at 0, moves by +-1 and stays
/// in the half-line, or if it is longer than 32 steps.
[[nodiscard]] std::uint32_t encode_path(const Path& path);
/// "0,1,0".
[[nodiscard]] std::string path_string(const Path& path);

/// Law of (X_0..X_n) from the reinforced kernel. Requires 1 <= n <= 20;
/// larger n throws std::length_error.
[[nodiscard]] PathDistribution enumerate_lerrw(
    const WalkConfig& cfg, unsigned n, ArithmeticMode mode = ArithmeticMode::Auto);

/// Probability of `path` under the walk in a Beta environment averaged over
/// the environment. Requires delta > 0.
[[nodiscard]] PathProbability annealed_path_prob(
    const WalkConfig& cfg, const Path& path,
    ArithmeticMode mode = ArithmeticMode::Auto);

struct DistanceResult {
  double value = 0.0;
  bool exact = false;
};

/// Total variation distance (half the L1 distance) between the enumerated
/// and annealed laws on paths of length n.
[[nodiscard]] DistanceResult equivalence_distance(
    const WalkConfig& cfg, unsigned n, ArithmeticMode mode = ArithmeticMode::Auto);

/// JSON object {"horizon", "exact", "paths": {"0,1,0": {"probability",
/// "exact"?}}}.
void write_path_distribution_json(std::ostream& os,
                                  const PathDistribution& dist);

/// s_0 .. s_{j_max} where s_j(x) = sum_{l<j} (-1)^l / f(l,x).
[[nodiscard]] std::vector<double> s_values(const WalkConfig& cfg, Vertex x,
                                           std::uint64_t j_max);

struct SBracket {
  std::uint64_t k = 0;
  double lower = 0.0;  ///< s_{2k}
  double upper = 0.0;  ///< s_{2k+1}
};

/// [s_{2k}, s_{2k+1}], which contains the limit s_inf(x). The even partial
/// sum is accumulated as a sum of positive pair terms. Requires k >= 1.
[[nodiscard]] SBracket s_inf_bracket(const WalkConfig& cfg, Vertex x,
                                     std::uint64_t k);

/// 1 / (2 f(0,x) + delta).
[[nodiscard]] double s_inf_lower_bound(const WalkConfig& cfg, Vertex x);

struct SClaimCertificate {
  bool certified = false;
  double bound = 0.0;
  SBracket bracket;
};

/// Doubles k until s_{2k} >= s_inf_lower_bound (which proves the claim for
/// this x) or k exceeds k_max. Requires delta > 0.
[[nodiscard]] SClaimCertificate certify_s_inf_claim(
    const WalkConfig& cfg, Vertex x, std::uint64_t k_max = 1ULL << 26);

struct PathFunctionals {
  /// Theta_n from the step increments, frozen after the first return.
  double theta = 0.0;
  /// Theta_n from M_n plus the correction sum.
  double theta_from_definition = 0.0;
  double m_value = 0.0;
  /// sum over every traversed edge x of s_{phi_n(x)}(x); set only before
  /// the first return, where it equals theta.
  std::optional<double> theta_s_form;
  /// The same sum restricted to x < X_n. Edges above X_n carry even counts
  /// and positive s_{phi}(x), so this falls short of theta unless X_n is
  /// the running maximum.
  std::optional<double> theta_s_form_truncated;
  std::optional<std::uint64_t> return_time;
  std::vector<std::uint64_t> phi;
};

/// Requires a valid path of length <= 16.
[[nodiscard]] PathFunctionals theta_along(const WalkConfig& cfg,
                                          const Path& path);

struct MartingaleReport {
  unsigned depth = 0;
  bool exact = false;
  /// Internal nodes at depth 1..n-1. The root is excluded: Theta_0 = 0
  /// while the forced first step gives Theta_1 = 1/f(0,0).
  std::uint64_t nodes_checked = 0;
  std::uint64_t pre_return_nodes = 0;
  /// max |E[Theta_{m+1} | node] - Theta_m|.
  double max_deviation = 0.0;
  /// max (E[M_{m+1} | node] - M_m); nonpositive for a supermartingale.
  double max_m_drift = 0.0;
  /// max |Theta_m - sum_x s_{phi_m(x)}(x)| over pre-return nodes, the sum
  /// running over every traversed edge.
  double max_s_form_error = 0.0;
  /// Pre-return nodes where the sum restricted to x < X_m differs from
  /// Theta_m, and how many of those sit at the running maximum (expected 0).
  std::uint64_t truncated_form_mismatches = 0;
  std::uint64_t truncated_form_mismatches_at_max = 0;
  /// max |Theta by increments - Theta by definition| over all nodes.
  double max_definition_error = 0.0;
  /// Pre-return nodes where some phi_m(x), x < X_m, is even.
  std::uint64_t parity_violations = 0;
};

/// Requires 1 <= n <= 16.
[[nodiscard]] MartingaleReport martingale_check(
    const WalkConfig& cfg, unsigned n, ArithmeticMode mode = ArithmeticMode::Auto);

}  // namespace lerrw
