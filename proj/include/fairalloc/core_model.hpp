#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairalloc {

using GoodIndex = std::size_t;
using AgentIndex = std::size_t;

/// Largest number of goods a bundle can reference (bundles are bitmasks).
inline constexpr std::size_t kMaxGoods = 64;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Malformed arguments or an instance that violates its invariants.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested combinatorial problem has no feasible solution.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive search would exceed its configured state budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Bundle
// ---------------------------------------------------------------------------

/// A set of goods, stored as a bitmask. The mask value doubles as the
/// canonical encoding used for lexicographic tie-breaking.
class Bundle {
 public:
  constexpr Bundle() = default;
  constexpr explicit Bundle(std::uint64_t mask) : mask_(mask) {}

  static Bundle of(std::initializer_list<GoodIndex> goods);
  static Bundle from_goods(std::span<const GoodIndex> goods);
  static constexpr Bundle singleton(GoodIndex good) { return Bundle(std::uint64_t{1} << good); }

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
  constexpr bool contains(GoodIndex good) const { return good < kMaxGoods && ((mask_ >> good) & 1U) != 0; }
  constexpr bool overlaps(Bundle other) const { return (mask_ & other.mask_) != 0; }
  /// Index one past the highest good in the bundle (0 for the empty bundle).
  constexpr std::size_t span_end() const { return kMaxGoods - static_cast<std::size_t>(std::countl_zero(mask_)); }

  std::vector<GoodIndex> goods() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::uint64_t m = mask_; m != 0; m &= m - 1) {
      fn(static_cast<GoodIndex>(std::countr_zero(m)));
    }
  }

  constexpr Bundle operator|(Bundle other) const { return Bundle(mask_ | other.mask_); }
  friend constexpr auto operator<=>(Bundle, Bundle) = default;

 private:
  std::uint64_t mask_ = 0;
};

std::string to_string(Bundle bundle);

// ---------------------------------------------------------------------------
// Dense row-major matrix (K x N value tables)
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Qualities
// ---------------------------------------------------------------------------

/// True qualities: either one N-vector shared by all agents, or a K x N
/// table of agent-specific qualities.
class QualityTable {
 public:
  QualityTable() = default;
  static QualityTable shared(std::vector<double> qualities, std::size_t n_agents);
  static QualityTable per_agent(Matrix qualities);

  bool is_shared() const { return shared_; }
  std::size_t n_agents() const { return n_agents_; }
  std::size_t n_goods() const { return table_.cols(); }
  double at(AgentIndex agent, GoodIndex good) const { return table_(shared_ ? 0 : agent, good); }
  /// Row of qualities seen by `agent` (the shared vector when shared).
  std::span<const double> row(AgentIndex agent) const { return table_.row(shared_ ? 0 : agent); }
  /// The shared quality vector; throws InputError for agent-specific tables.
  std::span<const double> shared_vector() const;
  /// The full K x N view (broadcasting the shared vector).
  Matrix as_matrix() const;

  friend bool operator==(const QualityTable&, const QualityTable&) = default;

 private:
  bool shared_ = true;
  std::size_t n_agents_ = 0;
  Matrix table_;
};

// ---------------------------------------------------------------------------
// Reward functions
// ---------------------------------------------------------------------------

enum class RewardKind { linear_sum, power_sum, clipped_square, expected_f };

/// Monotone, 1-Lipschitz link functions available to the expected-f reward.
enum class LinkFunction { identity, tanh, logistic, softplus };

std::string_view to_string(RewardKind kind);
std::string_view to_string(LinkFunction link);
RewardKind reward_kind_from_string(std::string_view text);
LinkFunction link_function_from_string(std::string_view text);

/// Bundle reward r(x; S). The empty bundle is worth 0 for every kind.
///
///  - linear_sum:      sum_{i in S} x_i
///  - power_sum(p):    sum_{i in S} x_i^p, p a positive odd integer
///  - clipped_square:  sum_{i in S} max(x_i, 0)^2
///  - expected_f(f,s): E[f(sum_{i in S} x_i + Z)], Z ~ N(0, |S| s^2)
class RewardFunction {
 public:
  static RewardFunction linear();
  static RewardFunction power(int exponent);
  static RewardFunction clipped_square();
  static RewardFunction expected(LinkFunction link, double noise_sigma);

  RewardKind kind() const { return kind_; }
  int exponent() const { return exponent_; }
  LinkFunction link() const { return link_; }
  double noise_sigma() const { return noise_sigma_; }

  /// Unchecked evaluation; callers guarantee the bundle fits in `x`.
  double operator()(std::span<const double> x, Bundle bundle) const;

  /// Lipschitz constant c on the box [-box, box]^N, so that
  /// |r(x;S) - r(y;S)| <= c * sum_{i in S} |x_i - y_i|.
  double lipschitz(double box) const;

  std::string describe() const;

  friend bool operator==(const RewardFunction&, const RewardFunction&) = default;

 private:
  RewardKind kind_ = RewardKind::linear_sum;
  int exponent_ = 1;
  LinkFunction link_ = LinkFunction::identity;
  double noise_sigma_ = 0.0;
};

/// Validated evaluation of r(qualities; bundle).
double evaluate_reward(const RewardFunction& rf, std::span<const double> qualities, Bundle bundle);

/// Reward function per agent (agents may share or differ).
class RewardProfile {
 public:
  RewardProfile() = default;
  static RewardProfile uniform(RewardFunction rf, std::size_t n_agents);
  explicit RewardProfile(std::vector<RewardFunction> per_agent);

  std::size_t n_agents() const { return per_agent_.size(); }
  const RewardFunction& of(AgentIndex agent) const { return per_agent_.at(agent); }
  const std::vector<RewardFunction>& per_agent() const { return per_agent_; }
  bool is_uniform() const;
  double lipschitz(double box) const;

  friend bool operator==(const RewardProfile&, const RewardProfile&) = default;

 private:
  std::vector<RewardFunction> per_agent_;
};

// ---------------------------------------------------------------------------
// Bundle families and allocations
// ---------------------------------------------------------------------------

enum class BundleRule { explicit_lists, all_subsets_up_to, singletons };

/// Feasible bundles A_j for each agent. Each list is kept sorted by mask and
/// always contains the empty bundle.
class BundleFamily {
 public:
  BundleFamily() = default;
  static BundleFamily all_subsets_up_to(std::size_t n_goods, std::size_t capacity, std::size_t n_agents,
                                        bool allow_overlap = false);
  static BundleFamily singletons(std::size_t n_goods, std::size_t n_agents, bool allow_overlap = false);
  static BundleFamily explicit_lists(std::size_t n_goods, std::vector<std::vector<Bundle>> per_agent,
                                     bool allow_overlap = false);

  std::size_t n_agents() const { return per_agent_.size(); }
  std::size_t n_goods() const { return n_goods_; }
  bool allow_overlap() const { return allow_overlap_; }
  BundleRule rule() const { return rule_; }
  /// Capacity m (largest bundle size among all families).
  std::size_t capacity() const { return capacity_; }
  std::span<const Bundle> of(AgentIndex agent) const { return per_agent_.at(agent); }
  bool contains(AgentIndex agent, Bundle bundle) const;
  /// Union of all agents' bundles, sorted and deduplicated.
  std::vector<Bundle> union_of_all() const;

  friend bool operator==(const BundleFamily&, const BundleFamily&) = default;

 private:
  std::size_t n_goods_ = 0;
  std::size_t capacity_ = 0;
  bool allow_overlap_ = false;
  BundleRule rule_ = BundleRule::explicit_lists;
  std::vector<std::vector<Bundle>> per_agent_;
};

/// Assignment of one bundle per agent.
struct Allocation {
  std::vector<Bundle> bundles;

  std::size_t n_agents() const { return bundles.size(); }
  Bundle operator[](AgentIndex agent) const { return bundles[agent]; }
  /// Unit-demand view: one good per agent.
  static Allocation from_assignment(std::span<const GoodIndex> goods);

  friend auto operator<=>(const Allocation&, const Allocation&) = default;
};

std::string to_string(const Allocation& allocation);

/// phi(j) in A_j for all j, and bundles pairwise disjoint (or pairwise
/// distinct when the family allows overlap).
bool is_feasible(const Allocation& allocation, const BundleFamily& family);

/// Evaluates every agent's reward for its own bundle.
std::vector<double> agent_rewards(const RewardProfile& rewards, std::span<const double> x,
                                  const Allocation& allocation);

/// min_j r^j(x; phi(j)).
double maxmin_objective(const RewardProfile& rewards, std::span<const double> x, const Allocation& allocation);

// ---------------------------------------------------------------------------
// Envy and group benefit
// ---------------------------------------------------------------------------

/// max(r^i(x_give; phi(j)) - r^i(x_keep; phi(i)), 0).
/// With x_give = x_keep = mu this is the true envy of i towards j.
double envy_between(const RewardFunction& rf_i, std::span<const double> x_give, std::span<const double> x_keep,
                    const Allocation& phi, AgentIndex i, AgentIndex j);

/// Largest envy over ordered pairs i != j.
double allocation_envy(const RewardProfile& rewards, std::span<const double> x_give,
                       std::span<const double> x_keep, const Allocation& phi);

/// A coalition L and the bundles its members would take under the deviation.
struct Deviation {
  std::vector<AgentIndex> coalition;
  std::vector<Bundle> bundles;  // bundles[k] is the deviating bundle of coalition[k]

  friend bool operator==(const Deviation&, const Deviation&) = default;
};

/// g^L = max_{j in L} [ r^j(x_stay; phi(j)) - r^j(x_leave; phi'(j)) ].
double group_benefit(const RewardProfile& rewards, std::span<const double> x_stay,
                     std::span<const double> x_leave, const Allocation& phi, const Deviation& deviation);

// ---------------------------------------------------------------------------
// Gap parameters
// ---------------------------------------------------------------------------

struct GapParameters {
  std::optional<double> delta_min;
  std::optional<double> delta_max;
  std::optional<double> tilde_delta_min;
  std::optional<double> tilde_delta_max;
  std::optional<double> delta_e_min;
  std::optional<double> delta_e_max;
  std::optional<double> delta_mq;
  std::optional<double> hat_delta;

  /// Throws InputError if a declared gap is not strictly positive or
  /// hat_delta < 2.
  void validate() const;

  friend bool operator==(const GapParameters&, const GapParameters&) = default;
};

}  // namespace fairalloc
