#include "evpca/config.hpp"

#include <fstream>

#include "json.hpp"

namespace evpca {

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }

  ExperimentConfig cfg;
  const std::string name = j.value("name", "close_eigenvalues");
  if (name == "close_eigenvalues")
    cfg.scheme = SimScheme::close_eigenvalues();
  else if (name == "different_eigenvalues")
    cfg.scheme = SimScheme::different_eigenvalues();
  else if (name == "custom")
    cfg.scheme.name = "custom";
  else
    throw InvalidInput("config: unknown scheme name '" + name + "'");

  if (j.contains("n")) cfg.scheme.n = j["n"].get<Index>();
  if (j.contains("p")) cfg.scheme.p = j["p"].get<Index>();
  if (j.contains("m")) cfg.scheme.m = j["m"].get<Index>();
  if (j.contains("sigma_head")) {
    const auto v = j["sigma_head"].get<std::vector<double>>();
    cfg.scheme.sigma_head =
        Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
  }
  if (j.contains("tail_decay"))
    cfg.scheme.tail_decay = j["tail_decay"].get<double>();
  if (j.contains("seed")) cfg.scheme.seed = j["seed"].get<std::uint64_t>();
  if (name == "custom" && !j.contains("sigma_head"))
    throw InvalidInput("config: custom scheme requires sigma_head");

  if (j.contains("lambdas"))
    cfg.grid = SparsityGrid(j["lambdas"].get<std::vector<double>>());
  if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
  if (j.contains("epsilons"))
    cfg.epsilons = j["epsilons"].get<std::vector<double>>();
  if (j.contains("pair_cap")) cfg.pair_cap = j["pair_cap"].get<long>();

  cfg.scheme.validate();
  if (cfg.trials < 1) throw InvalidInput("config: trials must be >= 1");
  return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return config_from_json(text);
}

}  // namespace evpca
