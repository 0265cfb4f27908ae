#include "evpca/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace evpca {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::array<double, 6> pev_vector(const ExpVarReport& r) {
  return {r.pev_subsp,   r.pev_opt_proj, r.pev_up_proj,
          r.pev_qr_proj, r.pev_qr_norm,  r.pev_up_norm};
}

namespace {

struct CellSet {
  // pev[def] per successful trial, one vector per (lambda index, def)
  std::vector<std::array<double, 6>> values;
};

/// All six pev for every (trial, lambda); failures leave a gap.
std::vector<std::vector<std::array<double, 6>>> evaluate_grid(
    const SimScheme& scheme, const SparsityGrid& grid, int trials,
    int* failed_cells) {
  scheme.validate();
  if (trials < 1) throw InvalidInput("experiment: trials must be >= 1");
  std::vector<std::vector<std::array<double, 6>>> per_lambda(
      grid.lambdas.size());
  if (failed_cells) *failed_cells = 0;
  for (int t = 0; t < trials; ++t) {
    const DataMatrix A = generate_matrix(scheme, t);
    for (std::size_t li = 0; li < grid.lambdas.size(); ++li) {
      try {
        const Loadings Z = sparsify_loadings(A, scheme.m, grid.lambdas[li]);
        per_lambda[li].push_back(pev_vector(report(A, Z)));
      } catch (const std::exception&) {
        if (failed_cells) ++*failed_cells;
      }
    }
  }
  return per_lambda;
}

}  // namespace

CurveTable run_pev_curves(const SimScheme& scheme, const SparsityGrid& grid,
                          int trials) {
  CurveTable table;
  table.scheme = scheme.name;
  table.seed = scheme.seed;
  const auto per_lambda =
      evaluate_grid(scheme, grid, trials, &table.failed_cells);

  for (std::size_t li = 0; li < grid.lambdas.size(); ++li) {
    const auto& cells = per_lambda[li];
    const int n = static_cast<int>(cells.size());
    for (int d = 0; d < 6; ++d) {
      double mean = 0, sd = 0;
      for (const auto& v : cells) mean += v[d];
      if (n > 0) mean /= n;
      if (n > 1) {
        for (const auto& v : cells) sd += (v[d] - mean) * (v[d] - mean);
        sd = std::sqrt(sd / (n - 1));
      }
      table.rows.push_back(
          {grid.lambdas[li], kDefinitionNames[d], mean, sd, n});
    }
  }
  return table;
}

std::string CurveTable::to_csv() const {
  std::ostringstream os;
  os << "# evpca " << EVPCA_VERSION << "\n";
  os << "# scheme=" << scheme << " seed=" << seed
     << " failed_cells=" << failed_cells << "\n";
  os << "scheme,lambda,definition,mean_pev,sd_pev,trials\n";
  for (const auto& r : rows)
    os << scheme << ',' << format_number(r.lambda) << ',' << r.definition
       << ',' << format_number(r.mean_pev) << ',' << format_number(r.sd_pev)
       << ',' << r.trials << "\n";
  return os.str();
}

std::vector<RankingReport> run_ranking(const SimScheme& scheme,
                                       const SparsityGrid& grid, int trials,
                                       const std::vector<double>& epsilons,
                                       long pair_cap) {
  const auto per_lambda = evaluate_grid(scheme, grid, trials, nullptr);
  std::vector<std::array<double, 6>> items;
  for (const auto& cells : per_lambda)
    items.insert(items.end(), cells.begin(), cells.end());

  const long T = static_cast<long>(items.size());
  const long pairs = T * (T - 1) / 2;
  if (pairs > pair_cap)
    throw InvalidInput(
        "run_ranking: " + std::to_string(pairs) +
        " pairs exceed the cap of " + std::to_string(pair_cap) +
        "; reduce trials or the lambda grid, or raise the cap");

  std::vector<RankingReport> out;
  for (double eps : epsilons) {
    RankingReport rep;
    rep.epsilon = eps;
    long considered = 0;
    long agree[6][6] = {};
    for (long a = 0; a < T; ++a)
      for (long b = a + 1; b < T; ++b) {
        bool dist = true;
        for (int i = 0; i < 6 && dist; ++i)
          dist = std::abs(items[a][i] - items[b][i]) >= eps;
        if (!dist) continue;
        ++considered;
        int sgn[6];
        for (int i = 0; i < 6; ++i) {
          const double d = items[a][i] - items[b][i];
          sgn[i] = d > 0 ? 1 : (d < 0 ? -1 : 0);
        }
        for (int i = 0; i < 6; ++i)
          for (int j = i + 1; j < 6; ++j)
            if (sgn[i] == sgn[j]) ++agree[i][j];
      }
    rep.n_pairs_considered = considered;
    rep.defined = considered > 0;
    if (rep.defined) {
      for (int i = 0; i < 6; ++i) {
        rep.agreement[i][i] = 100.0;
        for (int j = i + 1; j < 6; ++j) {
          const double pct = 100.0 * double(agree[i][j]) / double(considered);
          rep.agreement[i][j] = pct;
          rep.agreement[j][i] = pct;
        }
      }
    }
    out.push_back(rep);
  }
  return out;
}

std::string ranking_to_json(const std::vector<RankingReport>& reports,
                            const SimScheme& scheme) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"metadata\": {\"tool\": \"evpca\", \"version\": \"" << EVPCA_VERSION
     << "\", \"scheme\": \"" << scheme.name << "\", \"seed\": " << scheme.seed
     << "},\n";
  os << "  \"reports\": [\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    os << "    {\"epsilon\": " << format_number(r.epsilon)
       << ", \"definitions\": [";
    for (int i = 0; i < 6; ++i)
      os << (i ? ", " : "") << '"' << kDefinitionNames[i] << '"';
    os << "], \"agreement\": ";
    if (r.defined) {
      os << '[';
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          os << ((i || j) ? ", " : "") << format_number(r.agreement[i][j]);
      os << ']';
    } else {
      os << "null";
    }
    os << ", \"n_pairs_considered\": " << r.n_pairs_considered << '}'
       << (k + 1 < reports.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

}  // namespace evpca
