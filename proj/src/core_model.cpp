#include "fairalloc/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fairalloc {

// ---------------------------------------------------------------------------
// Bundle
// ---------------------------------------------------------------------------

Bundle Bundle::of(std::initializer_list<GoodIndex> goods) {
  return from_goods(std::span<const GoodIndex>(goods.begin(), goods.size()));
}

Bundle Bundle::from_goods(std::span<const GoodIndex> goods) {
  std::uint64_t mask = 0;
  for (GoodIndex g : goods) {
    if (g >= kMaxGoods) throw InputError("good index " + std::to_string(g) + " exceeds bundle capacity");
    mask |= std::uint64_t{1} << g;
  }
  return Bundle(mask);
}

std::vector<GoodIndex> Bundle::goods() const {
  std::vector<GoodIndex> out;
  out.reserve(size());
  for_each([&](GoodIndex g) { out.push_back(g); });
  return out;
}

std::string to_string(Bundle bundle) {
  std::string out = "{";
  bool first = true;
  bundle.for_each([&](GoodIndex g) {
    if (!first) out += ',';
    out += std::to_string(g);
    first = false;
  });
  return out + "}";
}

// ---------------------------------------------------------------------------
// Matrix / QualityTable
// ---------------------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw InputError("matrix data size does not match its shape");
}

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
  }
}

}  // namespace

QualityTable QualityTable::shared(std::vector<double> qualities, std::size_t n_agents) {
  if (qualities.empty()) throw InputError("quality vector is empty");
  if (n_agents == 0) throw InputError("number of agents must be positive");
  require_finite(qualities, "qualities");
  QualityTable out;
  out.shared_ = true;
  out.n_agents_ = n_agents;
  const std::size_t n = qualities.size();
  out.table_ = Matrix(1, n, std::move(qualities));
  return out;
}

QualityTable QualityTable::per_agent(Matrix qualities) {
  if (qualities.rows() == 0 || qualities.cols() == 0) throw InputError("quality matrix is empty");
  require_finite(qualities.data(), "qualities");
  QualityTable out;
  out.shared_ = false;
  out.n_agents_ = qualities.rows();
  out.table_ = std::move(qualities);
  return out;
}

std::span<const double> QualityTable::shared_vector() const {
  if (!shared_) throw InputError("qualities are agent-specific");
  return table_.row(0);
}

Matrix QualityTable::as_matrix() const {
  Matrix out(n_agents_, n_goods());
  for (std::size_t j = 0; j < n_agents_; ++j) {
    for (std::size_t i = 0; i < n_goods(); ++i) out(j, i) = at(j, i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reward functions
// ---------------------------------------------------------------------------

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::linear_sum: return "linear";
    case RewardKind::power_sum: return "power";
    case RewardKind::clipped_square: return "clipped-square";
    case RewardKind::expected_f: return "expected";
  }
  return "unknown";
}

std::string_view to_string(LinkFunction link) {
  switch (link) {
    case LinkFunction::identity: return "identity";
    case LinkFunction::tanh: return "tanh";
    case LinkFunction::logistic: return "logistic";
    case LinkFunction::softplus: return "softplus";
  }
  return "unknown";
}

RewardKind reward_kind_from_string(std::string_view text) {
  for (auto k : {RewardKind::linear_sum, RewardKind::power_sum, RewardKind::clipped_square, RewardKind::expected_f}) {
    if (to_string(k) == text) return k;
  }
  throw InputError("unknown reward kind '" + std::string(text) + "'");
}

LinkFunction link_function_from_string(std::string_view text) {
  for (auto l : {LinkFunction::identity, LinkFunction::tanh, LinkFunction::logistic, LinkFunction::softplus}) {
    if (to_string(l) == text) return l;
  }
  throw InputError("unknown link function '" + std::string(text) + "'");
}

RewardFunction RewardFunction::linear() { return RewardFunction{}; }

RewardFunction RewardFunction::power(int exponent) {
  if (exponent < 1 || exponent % 2 == 0) throw InputError("power-sum exponent must be a positive odd integer");
  RewardFunction rf;
  rf.kind_ = exponent == 1 ? RewardKind::linear_sum : RewardKind::power_sum;
  rf.exponent_ = exponent;
  return rf;
}

RewardFunction RewardFunction::clipped_square() {
  RewardFunction rf;
  rf.kind_ = RewardKind::clipped_square;
  rf.exponent_ = 2;
  return rf;
}

RewardFunction RewardFunction::expected(LinkFunction link, double noise_sigma) {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InputError("expected-f noise sigma must be >= 0");
  RewardFunction rf;
  rf.kind_ = RewardKind::expected_f;
  rf.link_ = link;
  rf.noise_sigma_ = noise_sigma;
  return rf;
}

namespace {

double apply_link(LinkFunction link, double s) {
  switch (link) {
    case LinkFunction::identity: return s;
    case LinkFunction::tanh: return std::tanh(s);
    case LinkFunction::logistic: return 1.0 / (1.0 + std::exp(-s));
    case LinkFunction::softplus: return s > 30.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  }
  return s;
}

// E[f(s + Z)], Z ~ N(0, var).
double gaussian_expectation(LinkFunction link, double s, double var) {
  if (link == LinkFunction::identity || var == 0.0) return apply_link(link, s);
  const double sd = std::sqrt(var);
  auto integrand = [&](double z) {
    return apply_link(link, s + sd * z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15, 1e-12);
}

}  // namespace

double RewardFunction::operator()(std::span<const double> x, Bundle bundle) const {
  if (bundle.empty()) return 0.0;
  double acc = 0.0;
  switch (kind_) {
    case RewardKind::linear_sum:
      bundle.for_each([&](GoodIndex g) { acc += x[g]; });
      return acc;
    case RewardKind::power_sum:
      bundle.for_each([&](GoodIndex g) {
        double p = 1.0;
        for (int e = 0; e < exponent_; ++e) p *= x[g];
        acc += p;
      });
      return acc;
    case RewardKind::clipped_square:
      bundle.for_each([&](GoodIndex g) {
        const double v = std::max(x[g], 0.0);
        acc += v * v;
      });
      return acc;
    case RewardKind::expected_f:
      bundle.for_each([&](GoodIndex g) { acc += x[g]; });
      return gaussian_expectation(link_, acc, static_cast<double>(bundle.size()) * noise_sigma_ * noise_sigma_);
  }
  return acc;
}

double RewardFunction::lipschitz(double box) const {
  switch (kind_) {
    case RewardKind::linear_sum: return 1.0;
    case RewardKind::power_sum: return exponent_ * std::pow(box, exponent_ - 1);
    case RewardKind::clipped_square: return 2.0 * box;
    case RewardKind::expected_f: return link_ == LinkFunction::logistic ? 0.25 : 1.0;
  }
  return 1.0;
}

std::string RewardFunction::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (kind_ == RewardKind::power_sum) os << '(' << exponent_ << ')';
  if (kind_ == RewardKind::expected_f) os << '(' << to_string(link_) << ',' << noise_sigma_ << ')';
  return os.str();
}

double evaluate_reward(const RewardFunction& rf, std::span<const double> qualities, Bundle bundle) {
  if (bundle.span_end() > qualities.size()) {
    throw InputError("bundle " + to_string(bundle) + " references a good outside 0.." +
                     std::to_string(qualities.size()));
  }
  require_finite(qualities, "qualities");
  return rf(qualities, bundle);
}

RewardProfile RewardProfile::uniform(RewardFunction rf, std::size_t n_agents) {
  if (n_agents == 0) throw InputError("number of agents must be positive");
  return RewardProfile(std::vector<RewardFunction>(n_agents, rf));
}

RewardProfile::RewardProfile(std::vector<RewardFunction> per_agent) : per_agent_(std::move(per_agent)) {
  if (per_agent_.empty()) throw InputError("reward profile needs at least one agent");
}

bool RewardProfile::is_uniform() const {
  return std::all_of(per_agent_.begin(), per_agent_.end(), [&](const RewardFunction& rf) { return rf == per_agent_[0]; });
}

double RewardProfile::lipschitz(double box) const {
  double c = 0.0;
  for (const auto& rf : per_agent_) c = std::max(c, rf.lipschitz(box));
  return c;
}

// ---------------------------------------------------------------------------
// BundleFamily / Allocation
// ---------------------------------------------------------------------------

namespace {

void check_goods(std::size_t n_goods) {
  if (n_goods == 0) throw InputError("number of goods must be positive");
  if (n_goods > kMaxGoods) throw InputError("at most 64 goods are supported");
}

}  // namespace

BundleFamily BundleFamily::all_subsets_up_to(std::size_t n_goods, std::size_t capacity, std::size_t n_agents,
                                             bool allow_overlap) {
  check_goods(n_goods);
  if (capacity == 0) throw InputError("bundle capacity must be positive");
  if (n_goods > 24) throw InputError("all_subsets_up_to supports at most 24 goods");
  capacity = std::min(capacity, n_goods);
  std::vector<Bundle> list;
  const std::uint64_t limit = std::uint64_t{1} << n_goods;
  for (std::uint64_t m = 0; m < limit; ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) <= capacity) list.emplace_back(m);
  }
  BundleFamily f = explicit_lists(n_goods, std::vector<std::vector<Bundle>>(n_agents, list), allow_overlap);
  f.rule_ = BundleRule::all_subsets_up_to;
  f.capacity_ = capacity;
  return f;
}

BundleFamily BundleFamily::singletons(std::size_t n_goods, std::size_t n_agents, bool allow_overlap) {
  check_goods(n_goods);
  std::vector<Bundle> list{Bundle{}};
  for (GoodIndex g = 0; g < n_goods; ++g) list.push_back(Bundle::singleton(g));
  BundleFamily f = explicit_lists(n_goods, std::vector<std::vector<Bundle>>(n_agents, list), allow_overlap);
  f.rule_ = BundleRule::singletons;
  return f;
}

BundleFamily BundleFamily::explicit_lists(std::size_t n_goods, std::vector<std::vector<Bundle>> per_agent,
                                          bool allow_overlap) {
  check_goods(n_goods);
  if (per_agent.empty()) throw InputError("bundle family needs at least one agent");
  BundleFamily f;
  f.n_goods_ = n_goods;
  f.allow_overlap_ = allow_overlap;
  f.rule_ = BundleRule::explicit_lists;
  for (auto& list : per_agent) {
    list.push_back(Bundle{});
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (Bundle b : list) {
      if (b.span_end() > n_goods) throw InputError("bundle " + to_string(b) + " references an unknown good");
      f.capacity_ = std::max(f.capacity_, b.size());
    }
  }
  f.capacity_ = std::max<std::size_t>(f.capacity_, 1);
  f.per_agent_ = std::move(per_agent);
  return f;
}

bool BundleFamily::contains(AgentIndex agent, Bundle bundle) const {
  const auto list = of(agent);
  return std::binary_search(list.begin(), list.end(), bundle);
}

std::vector<Bundle> BundleFamily::union_of_all() const {
  std::vector<Bundle> out;
  for (const auto& list : per_agent_) out.insert(out.end(), list.begin(), list.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Allocation Allocation::from_assignment(std::span<const GoodIndex> goods) {
  Allocation a;
  a.bundles.reserve(goods.size());
  for (GoodIndex g : goods) a.bundles.push_back(Bundle::singleton(g));
  return a;
}

std::string to_string(const Allocation& allocation) {
  std::string out = "(";
  for (std::size_t j = 0; j < allocation.bundles.size(); ++j) {
    if (j) out += ',';
    out += to_string(allocation.bundles[j]);
  }
  return out + ")";
}

bool is_feasible(const Allocation& allocation, const BundleFamily& family) {
  if (allocation.n_agents() != family.n_agents()) return false;
  for (AgentIndex j = 0; j < allocation.n_agents(); ++j) {
    if (!family.contains(j, allocation[j])) return false;
  }
  for (AgentIndex a = 0; a < allocation.n_agents(); ++a) {
    for (AgentIndex b = a + 1; b < allocation.n_agents(); ++b) {
      if (family.allow_overlap()) {
        if (allocation[a] == allocation[b] && !allocation[a].empty()) return false;
      } else if (allocation[a].overlaps(allocation[b])) {
        return false;
      }
    }
  }
  return true;
}

namespace {

void check_allocation(const RewardProfile& rewards, std::span<const double> x, const Allocation& allocation) {
  if (allocation.n_agents() != rewards.n_agents()) throw InputError("allocation and reward profile disagree on K");
  for (Bundle b : allocation.bundles) {
    if (b.span_end() > x.size()) throw InputError("allocation references a good outside the quality vector");
  }
}

}  // namespace

std::vector<double> agent_rewards(const RewardProfile& rewards, std::span<const double> x,
                                  const Allocation& allocation) {
  check_allocation(rewards, x, allocation);
  std::vector<double> out(allocation.n_agents());
  for (AgentIndex j = 0; j < out.size(); ++j) out[j] = rewards.of(j)(x, allocation[j]);
  return out;
}

double maxmin_objective(const RewardProfile& rewards, std::span<const double> x, const Allocation& allocation) {
  const auto r = agent_rewards(rewards, x, allocation);
  return *std::min_element(r.begin(), r.end());
}

// ---------------------------------------------------------------------------
// Envy / group benefit
// ---------------------------------------------------------------------------

double envy_between(const RewardFunction& rf_i, std::span<const double> x_give, std::span<const double> x_keep,
                    const Allocation& phi, AgentIndex i, AgentIndex j) {
  if (i == j) throw InputError("envy needs two distinct agents");
  if (i >= phi.n_agents() || j >= phi.n_agents()) throw InputError("agent index outside the allocation");
  if (x_give.size() != x_keep.size()) throw InputError("estimate vectors differ in length");
  const double gain = evaluate_reward(rf_i, x_give, phi[j]) - evaluate_reward(rf_i, x_keep, phi[i]);
  return std::max(gain, 0.0);
}

double allocation_envy(const RewardProfile& rewards, std::span<const double> x_give, std::span<const double> x_keep,
                       const Allocation& phi) {
  if (phi.n_agents() < 2) throw InputError("envy is undefined for fewer than two agents");
  if (phi.n_agents() != rewards.n_agents()) throw InputError("allocation and reward profile disagree on K");
  double worst = 0.0;
  for (AgentIndex i = 0; i < phi.n_agents(); ++i) {
    for (AgentIndex j = 0; j < phi.n_agents(); ++j) {
      if (i != j) worst = std::max(worst, envy_between(rewards.of(i), x_give, x_keep, phi, i, j));
    }
  }
  return worst;
}

double group_benefit(const RewardProfile& rewards, std::span<const double> x_stay, std::span<const double> x_leave,
                     const Allocation& phi, const Deviation& deviation) {
  if (deviation.coalition.empty()) throw InputError("coalition must be nonempty");
  if (deviation.coalition.size() != deviation.bundles.size()) throw InputError("deviation is not defined on all of L");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < deviation.coalition.size(); ++k) {
    const AgentIndex j = deviation.coalition[k];
    if (j >= phi.n_agents()) throw InputError("coalition member outside the allocation");
    const auto& rf = rewards.of(j);
    best = std::max(best, evaluate_reward(rf, x_stay, phi[j]) - evaluate_reward(rf, x_leave, deviation.bundles[k]));
  }
  return best;
}

// ---------------------------------------------------------------------------
// GapParameters
// ---------------------------------------------------------------------------

void GapParameters::validate() const {
  auto positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) throw InputError(std::string(name) + " must be strictly positive");
  };
  positive(delta_min, "delta_min");
  positive(delta_max, "delta_max");
  positive(tilde_delta_min, "tilde_delta_min");
  positive(tilde_delta_max, "tilde_delta_max");
  positive(delta_e_min, "delta_e_min");
  positive(delta_e_max, "delta_e_max");
  positive(delta_mq, "delta_mq");
  if (hat_delta && !(*hat_delta >= 2.0)) throw InputError("hat_delta must be at least 2");
}

}  // namespace fairalloc
