#include "fairalloc/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "json_detail.hpp"

namespace fairalloc {

namespace detail {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("instance is missing '") + key + "'");
  return j.at(key);
}

RewardFunction reward_from_json(const json& j) {
  if (j.is_string()) return reward_from_json(json{{"kind", j}});
  const auto kind = reward_kind_from_string(require(j, "kind").get<std::string>());
  switch (kind) {
    case RewardKind::linear_sum: return RewardFunction::linear();
    case RewardKind::power_sum: return RewardFunction::power(require(j, "p").get<int>());
    case RewardKind::clipped_square: return RewardFunction::clipped_square();
    case RewardKind::expected_f:
      return RewardFunction::expected(link_function_from_string(j.value("link", std::string("identity"))),
                                      j.value("sigma", 0.0));
  }
  throw InputError("unsupported reward");
}

json reward_to_json(const RewardFunction& rf) {
  json j{{"kind", std::string(to_string(rf.kind()))}};
  if (rf.kind() == RewardKind::power_sum) j["p"] = rf.exponent();
  if (rf.kind() == RewardKind::expected_f) {
    j["link"] = std::string(to_string(rf.link()));
    j["sigma"] = rf.noise_sigma();
  }
  return j;
}

BundleFamily family_from_json(const json& j, std::size_t n, std::size_t k, bool overlap) {
  if (j.is_string()) {
    if (j.get<std::string>() != "singletons") throw InputError("unknown bundle rule '" + j.get<std::string>() + "'");
    return BundleFamily::singletons(n, k, overlap);
  }
  if (j.contains("all_subsets_up_to")) {
    return BundleFamily::all_subsets_up_to(n, j.at("all_subsets_up_to").get<std::size_t>(), k, overlap);
  }
  if (j.contains("explicit")) {
    std::vector<std::vector<Bundle>> lists;
    for (const auto& agent : j.at("explicit")) {
      std::vector<Bundle> list;
      for (const auto& goods : agent) list.push_back(Bundle::from_goods(goods.get<std::vector<GoodIndex>>()));
      lists.push_back(std::move(list));
    }
    if (lists.size() != k) throw InputError("explicit bundle lists must cover every agent");
    return BundleFamily::explicit_lists(n, std::move(lists), overlap);
  }
  throw InputError("bundles must be \"singletons\", {\"all_subsets_up_to\": m} or {\"explicit\": [...]}");
}

json family_to_json(const BundleFamily& f) {
  switch (f.rule()) {
    case BundleRule::singletons: return "singletons";
    case BundleRule::all_subsets_up_to: return json{{"all_subsets_up_to", f.capacity()}};
    case BundleRule::explicit_lists: break;
  }
  json lists = json::array();
  for (std::size_t a = 0; a < f.n_agents(); ++a) {
    json list = json::array();
    for (Bundle b : f.of(a)) list.push_back(b.goods());
    lists.push_back(std::move(list));
  }
  return json{{"explicit", std::move(lists)}};
}

MatchingMarket market_from_json(const json& j) {
  if (j.value("kind", std::string("marriage")) != "marriage") throw InputError("only marriage markets are supported");
  const auto n = require(j, "size").get<std::size_t>();
  const double eta = require(j, "eta").get<double>();
  const double epsilon = j.contains("epsilon") ? j.at("epsilon").get<double>() : eta / 2.0;
  if (!j.contains("matchings")) return MatchingMarket::full_marriage(n, eta, epsilon);
  return MatchingMarket::marriage(n, j.at("matchings").get<std::vector<std::vector<std::size_t>>>(), eta, epsilon);
}

json market_to_json(const MatchingMarket& m) {
  const std::size_t n = m.marriage_size();
  if (n == 0) throw InputError("only marriage markets can be serialized");
  json perms = json::array();
  for (const Allocation& phi : m.matchings()) {
    std::vector<std::size_t> perm(n);
    for (std::size_t man = 0; man < n; ++man) perm[man] = phi[man].goods().at(0) - man * n;
    perms.push_back(perm);
  }
  return json{{"kind", "marriage"}, {"size", n}, {"eta", m.eta()}, {"epsilon", m.epsilon()}, {"matchings", perms}};
}

GapParameters gaps_from_json(const json& j) {
  GapParameters g;
  auto read = [&](const char* key, std::optional<double>& slot) {
    if (j.contains(key)) slot = j.at(key).get<double>();
  };
  read("delta_min", g.delta_min);
  read("delta_max", g.delta_max);
  read("tilde_delta_min", g.tilde_delta_min);
  read("tilde_delta_max", g.tilde_delta_max);
  read("delta_e_min", g.delta_e_min);
  read("delta_e_max", g.delta_e_max);
  read("delta_mq", g.delta_mq);
  read("hat_delta", g.hat_delta);
  return g;
}

json gaps_to_json(const GapParameters& g) {
  json j = json::object();
  auto write = [&](const char* key, const std::optional<double>& slot) {
    if (slot) j[key] = *slot;
  };
  write("delta_min", g.delta_min);
  write("delta_max", g.delta_max);
  write("tilde_delta_min", g.tilde_delta_min);
  write("tilde_delta_max", g.tilde_delta_max);
  write("delta_e_min", g.delta_e_min);
  write("delta_e_max", g.delta_e_max);
  write("delta_mq", g.delta_mq);
  write("hat_delta", g.hat_delta);
  return j;
}

}  // namespace

ProblemInstance instance_from_json(const json& j) {
  try {
    if (!j.is_object()) throw InputError("instance must be a JSON object");
    ProblemInstance inst;
    inst.name = j.value("name", std::string());
    const auto n = require(j, "n_goods").get<std::size_t>();
    const auto k = require(j, "n_agents").get<std::size_t>();
    const json& q = require(j, "qualities");
    if (!q.is_array() || q.empty()) throw InputError("qualities must be a nonempty array");
    if (q.front().is_array()) {
      std::vector<double> flat;
      for (const auto& row : q) {
        const auto r = row.get<std::vector<double>>();
        if (r.size() != n) throw InputError("quality row length differs from n_goods");
        flat.insert(flat.end(), r.begin(), r.end());
      }
      if (q.size() != k) throw InputError("quality matrix must have n_agents rows");
      inst.qualities = QualityTable::per_agent(Matrix(k, n, std::move(flat)));
    } else {
      auto mu = q.get<std::vector<double>>();
      if (mu.size() != n) throw InputError("quality vector length differs from n_goods");
      inst.qualities = QualityTable::shared(std::move(mu), k);
    }
    inst.noise_sigma = require(j, "sigma").get<double>();
    inst.noise = noise_kind_from_string(j.value("noise", std::string("gaussian")));
    inst.quality_box = j.contains("quality_box") ? j.at("quality_box").get<double>()
                                                 : max_abs(inst.qualities.as_matrix().data());
    if (j.contains("rewards")) {
      std::vector<RewardFunction> per;
      for (const auto& r : j.at("rewards")) per.push_back(reward_from_json(r));
      if (per.size() != k) throw InputError("rewards must list one entry per agent");
      inst.rewards = RewardProfile(std::move(per));
    } else {
      inst.rewards = RewardProfile::uniform(j.contains("reward") ? reward_from_json(j.at("reward"))
                                                                 : RewardFunction::linear(),
                                            k);
    }
    inst.bundles = family_from_json(j.contains("bundles") ? j.at("bundles") : json("singletons"), n, k,
                                    j.value("allow_overlap", false));
    if (j.contains("market")) inst.market = market_from_json(j.at("market"));
    if (j.contains("gaps")) inst.gaps = gaps_from_json(j.at("gaps"));
    inst.envy_nonempty = j.value("envy_nonempty", false);
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed instance: ") + e.what());
  }
}

json instance_to_json(const ProblemInstance& inst) {
  json j;
  if (!inst.name.empty()) j["name"] = inst.name;
  j["n_goods"] = inst.n_goods();
  j["n_agents"] = inst.n_agents();
  if (inst.qualities.is_shared()) {
    const auto mu = inst.qualities.shared_vector();
    j["qualities"] = std::vector<double>(mu.begin(), mu.end());
  } else {
    json rows = json::array();
    for (std::size_t a = 0; a < inst.n_agents(); ++a) {
      const auto r = inst.qualities.row(a);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["qualities"] = std::move(rows);
  }
  j["sigma"] = inst.noise_sigma;
  j["noise"] = std::string(to_string(inst.noise));
  j["quality_box"] = inst.quality_box;
  if (inst.rewards.is_uniform()) {
    j["reward"] = reward_to_json(inst.rewards.of(0));
  } else {
    json list = json::array();
    for (const auto& rf : inst.rewards.per_agent()) list.push_back(reward_to_json(rf));
    j["rewards"] = std::move(list);
  }
  j["bundles"] = family_to_json(inst.bundles);
  j["allow_overlap"] = inst.bundles.allow_overlap();
  if (inst.market) j["market"] = market_to_json(*inst.market);
  const json gaps = gaps_to_json(inst.gaps);
  if (!gaps.empty()) j["gaps"] = gaps;
  if (inst.envy_nonempty) j["envy_nonempty"] = true;
  return j;
}

}  // namespace detail

ProblemInstance parse_instance(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  return detail::instance_from_json(j);
}

std::string emit_instance(const ProblemInstance& instance) { return detail::instance_to_json(instance).dump(2) + "\n"; }

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void save_instance(const std::filesystem::path& path, const ProblemInstance& instance) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write instance file " + path.string());
  out << emit_instance(instance);
}

}  // namespace fairalloc
