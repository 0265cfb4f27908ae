#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evpca/blockpca.hpp"
#include "evpca/config.hpp"
#include "evpca/report.hpp"

namespace py = pybind11;
using namespace evpca;

namespace {

py::dict report_dict(const ExpVarReport& r) {
  py::dict d;
  d["subsp"] = r.subsp;
  d["qr_norm"] = r.qr_norm;
  d["up_norm"] = r.up_norm;
  d["qr_proj"] = r.qr_proj;
  d["up_proj"] = r.up_proj;
  d["opt_proj"] = r.opt_proj;
  d["pev_subsp"] = r.pev_subsp;
  d["pev_qr_norm"] = r.pev_qr_norm;
  d["pev_up_norm"] = r.pev_up_norm;
  d["pev_qr_proj"] = r.pev_qr_proj;
  d["pev_up_proj"] = r.pev_up_proj;
  d["pev_opt_proj"] = r.pev_opt_proj;
  d["total_var_y"] = r.total_var_y;
  d["pca_bound"] = r.pca_bound;
  return d;
}

BasisRule parse_rule(const std::string& rule) {
  if (rule == "qr") return BasisRule::QR;
  if (rule == "up") return BasisRule::UP;
  throw InvalidInput("rule must be 'qr' or 'up'");
}

SimScheme parse_scheme(const std::string& name, std::uint64_t seed) {
  if (name == "close_eigenvalues") return SimScheme::close_eigenvalues(seed);
  if (name == "different_eigenvalues")
    return SimScheme::different_eigenvalues(seed);
  throw InvalidInput("unknown scheme '" + name + "'");
}

std::optional<Weights> parse_weights(const std::optional<Vector>& mu) {
  if (!mu) return std::nullopt;
  return Weights(*mu);
}

}  // namespace

PYBIND11_MODULE(evpca, mod) {
  mod.doc() = "Explained-variance definitions for correlated PCA components";
  mod.attr("__version__") = EVPCA_VERSION;

  py::register_exception<InvalidInput>(mod, "InvalidInput", PyExc_ValueError);
  py::register_exception<RankDeficient>(mod, "RankDeficient", PyExc_ValueError);
  py::register_exception<DegenerateBasis>(mod, "DegenerateBasis",
                                          PyExc_ArithmeticError);
  py::register_exception<NonConverged>(mod, "NonConverged",
                                       PyExc_RuntimeError);

  mod.def("truncated_svd", [](const Matrix& A) {
    const SpectralModel s = truncated_svd(A);
    return py::make_tuple(s.U, s.sigma, s.V);
  }, py::arg("A"), "Deterministic thin SVD truncated to the numerical rank.");

  mod.def("qr_decompose", [](const Matrix& Y, bool pivot) {
    const QRFactors f = qr_decompose(Y, pivot);
    return py::make_tuple(f.Q, f.R, f.perm);
  }, py::arg("Y"), py::arg("pivot") = true);

  mod.def("polar_decompose", [](const Matrix& Y) {
    const PolarFactors f = polar_decompose(Y);
    return py::make_tuple(f.U, f.P);
  }, py::arg("Y"));

  mod.def("projector", &projector, py::arg("Z"));

  mod.def("subspace_var", [](const Matrix& A, const Matrix& Z) {
    return subspace_var(DataMatrix(A), Loadings(Z));
  }, py::arg("A"), py::arg("Z"));

  mod.def("normalized_var",
          [](const Matrix& A, const Matrix& Z, const std::string& rule,
             bool pivot_qr) {
            return normalized_var(DataMatrix(A), Loadings(Z),
                                  parse_rule(rule), pivot_qr);
          },
          py::arg("A"), py::arg("Z"), py::arg("rule"),
          py::arg("pivot_qr") = true);

  mod.def("projected_var",
          [](const Matrix& A, const Matrix& Z, const std::string& rule,
             bool pivot_qr) {
            return projected_var(DataMatrix(A), Loadings(Z), parse_rule(rule),
                                 pivot_qr);
          },
          py::arg("A"), py::arg("Z"), py::arg("rule"),
          py::arg("pivot_qr") = true);

  mod.def("optimal_projected_var",
          [](const Matrix& A, const Matrix& Z,
             const std::optional<Vector>& weights, double tol, int max_iter) {
            const OptProjResult r =
                optimal_projected_var(DataMatrix(A), Loadings(Z),
                                      parse_weights(weights), tol, max_iter);
            return py::make_tuple(r.value, r.basis.X, r.iterations);
          },
          py::arg("A"), py::arg("Z"), py::arg("weights") = std::nullopt,
          py::arg("tol") = 1e-12, py::arg("max_iter") = 1000);

  mod.def("report", [](const Matrix& A, const Matrix& Z) {
    return report_dict(report(DataMatrix(A), Loadings(Z)));
  }, py::arg("A"), py::arg("Z"),
     "All six explained-variance values plus pev in one pass.");

  mod.def("solve_weighted",
          [](const Matrix& A, Index m, const Vector& mu, double tol,
             int max_iter, std::uint64_t seed) {
            const BlockPcaSolution s =
                solve_weighted(DataMatrix(A), m, Weights(mu), tol, max_iter,
                               nullptr, seed);
            py::dict d;
            d["Z_star"] = s.Z_star;
            d["X_star"] = s.X_star;
            d["objective"] = s.objective;
            d["iterations"] = s.iterations;
            d["converged"] = s.converged;
            d["matched_svd"] = s.matched_svd;
            d["degenerate_spectrum"] = s.degenerate_spectrum;
            return d;
          },
          py::arg("A"), py::arg("m"), py::arg("mu"), py::arg("tol") = 1e-12,
          py::arg("max_iter") = 1000, py::arg("seed") = 0);

  mod.def("certify_pca_optimality", [](const Matrix& A, const Matrix& Z) {
    const OptimalityCertificate c =
        certify_pca_optimality(DataMatrix(A), Loadings(Z));
    py::dict d;
    d["span_match"] = c.span_match;
    d["weighted_orth_residual"] = c.weighted_orth_residual;
    d["normal_basis_residual"] = c.normal_basis_residual;
    d["is_pca_optimal"] = c.is_pca_optimal;
    return d;
  }, py::arg("A"), py::arg("Z"));

  mod.def("find_parasitic_up",
          [](const Matrix& A, Index m, double tol, int restarts,
             std::uint64_t seed) {
            return find_parasitic_up(DataMatrix(A), m, tol, restarts, seed);
          },
          py::arg("A"), py::arg("m"), py::arg("tol") = 1e-13,
          py::arg("restarts") = 64, py::arg("seed") = 0);

  mod.def("generate_matrix",
          [](const std::string& scheme, std::uint64_t seed, int trial) {
            return generate_matrix(parse_scheme(scheme, seed), trial).values();
          },
          py::arg("scheme"), py::arg("seed") = 0, py::arg("trial") = 0);

  mod.def("sparsify_loadings",
          [](const Matrix& A, Index m, double lam) {
            return sparsify_loadings(DataMatrix(A), m, lam).matrix();
          },
          py::arg("A"), py::arg("m"), py::arg("lam"));

  mod.def("run_pev_curves",
          [](const std::string& scheme, std::uint64_t seed,
             const std::vector<double>& lambdas, int trials) {
            return run_pev_curves(parse_scheme(scheme, seed),
                                  SparsityGrid(lambdas), trials)
                .to_csv();
          },
          py::arg("scheme"), py::arg("seed"), py::arg("lambdas"),
          py::arg("trials"),
          "Mean/sd pev per (lambda, definition) as a CSV string.");

  mod.def("run_ranking",
          [](const std::string& scheme, std::uint64_t seed,
             const std::vector<double>& lambdas, int trials,
             const std::vector<double>& epsilons, long pair_cap) {
            const SimScheme sch = parse_scheme(scheme, seed);
            return ranking_to_json(
                run_ranking(sch, SparsityGrid(lambdas), trials, epsilons,
                            pair_cap),
                sch);
          },
          py::arg("scheme"), py::arg("seed"), py::arg("lambdas"),
          py::arg("trials"), py::arg("epsilons"),
          py::arg("pair_cap") = kDefaultPairCap,
          "Pairwise ranking-agreement matrices as a JSON string.");
}
