#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "bwt/barycenter.hpp"
#include "bwt/geodesic.hpp"
#include "bwt/gproc.hpp"
#include "bwt/schur.hpp"
#include "bwt/transport.hpp"

namespace py = pybind11;
using namespace bwt;

namespace {

CovMatrix cov(const Matrix& m, double tol_rel) { return CovMatrix(m, tol_rel); }

ParamStyle style_from(const std::string& name, double s) {
  if (name == "extreme") return ParamStyle::extreme();
  if (name == "zero") return ParamStyle::zero();
  if (name == "scaled") return ParamStyle::scaled(s);
  throw InvalidParam("unknown style '" + name + "'");
}

py::dict map_dict(const TransportMap& m) {
  py::dict d;
  d["t"] = m.t;
  d["u12"] = m.u12;
  d["residual_transport"] = m.residual_transport;
  d["residual_optimality"] = m.residual_optimality;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bwt, m) {
  m.doc() = "Bures-Wasserstein transport between possibly singular Gaussian covariances";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<InvalidParam>(m, "InvalidParam", base.ptr());
  py::register_exception<Unreachable>(m, "Unreachable", base.ptr());
  py::register_exception<NoSpdMap>(m, "NoSpdMap", base.ptr());
  py::register_exception<NotInvertible>(m, "NotInvertible", base.ptr());
  py::register_exception<PreconditionFailed>(m, "PreconditionFailed", base.ptr());
  py::register_exception<NumericalInconsistency>(m, "NumericalInconsistency", base.ptr());

  m.attr("DEFAULT_TOL_REL") = kDefaultTolRel;
  m.attr("DEFAULT_TOL_MAP") = kDefaultTolMap;

  m.def(
      "rank", [](const Matrix& a, double tol_rel) { return cov(a, tol_rel).rank(); }, py::arg("a"),
      py::arg("tol_rel") = kDefaultTolRel);

  m.def(
      "w2_squared", [](const Matrix& a, const Matrix& b, double tol_rel) { return w2_squared(cov(a, tol_rel), cov(b, tol_rel)); },
      py::arg("a"), py::arg("b"), py::arg("tol_rel") = kDefaultTolRel);
  m.def(
      "w2_distance",
      [](const Matrix& a, const Matrix& b, double tol_rel) { return w2_distance(cov(a, tol_rel), cov(b, tol_rel)); },
      py::arg("a"), py::arg("b"), py::arg("tol_rel") = kDefaultTolRel);
  m.def(
      "is_reachable",
      [](const Matrix& a, const Matrix& b, double tol_rel) { return is_reachable(cov(a, tol_rel), cov(b, tol_rel)); },
      py::arg("a"), py::arg("b"), py::arg("tol_rel") = kDefaultTolRel);

  m.def(
      "ot_map",
      [](const Matrix& a, const Matrix& b, bool negate_u12, bool spd_free, double tol_map) {
        MapOptions o;
        o.u12 = negate_u12 ? U12Policy::Negated : U12Policy::Deterministic;
        o.free_blocks = spd_free ? FreeBlocks::SpdCanonical : FreeBlocks::SymmetricZero;
        o.tol_map = tol_map;
        return map_dict(ot_map(CovMatrix(a), CovMatrix(b), o));
      },
      py::arg("a"), py::arg("b"), py::arg("negate_u12") = false, py::arg("spd_free") = false,
      py::arg("tol_map") = kDefaultTolMap, "Optimal transport map T with T A T^T = B as a dict.");
  m.def(
      "canonical_spd_map",
      [](const Matrix& a, const Matrix& b, double tol_map) {
        return map_dict(canonical_spd_map(CovMatrix(a), CovMatrix(b), tol_map));
      },
      py::arg("a"), py::arg("b"), py::arg("tol_map") = kDefaultTolMap);
  m.def(
      "spd_reachability",
      [](const Matrix& a, const Matrix& b, double tol_map) {
        const SpdReachReport r = spd_reachability(CovMatrix(a), CovMatrix(b), tol_map);
        py::dict d;
        d["spd_exists"] = r.spd_exists;
        d["as_unique"] = r.as_unique;
        d["schur_zero"] = r.schur_zero;
        d["range_eq"] = r.range_eq;
        d["trivial_intersection"] = r.trivial_intersection;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("tol_map") = kDefaultTolMap);

  m.def(
      "schur_complement",
      [](const Matrix& a, const Matrix& b, double tol_map) {
        return schur_complement(CovMatrix(a), CovMatrix(b), tol_map).value;
      },
      py::arg("a"), py::arg("b"), py::arg("tol_map") = kDefaultTolMap, "Generalized Schur complement B/A.");

  m.def(
      "geodesic",
      [](const Matrix& a, const Matrix& b, const std::vector<double>& ts, const std::string& style, double s) {
        const CovMatrix ca(a), cb(b);
        const GeodesicPath path(ca, cb, make_param(ca, cb, style_from(style, s)));
        std::vector<Matrix> out;
        for (const CovMatrix& g : sample_path(path, ts)) out.push_back(g.data());
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("ts"), py::arg("style") = "extreme", py::arg("s") = 1.0,
      "Points of a constant-speed geodesic at sorted times in [0, 1].");

  m.def(
      "barycenter",
      [](const std::vector<Matrix>& covs, std::optional<std::vector<double>> weights, int max_iter,
         std::optional<std::uint64_t> seed) {
        BarycenterProblem p;
        for (const Matrix& c : covs) p.covs.emplace_back(c);
        if (weights) p.weights = *weights;
        else p.weights.assign(covs.size(), 1.0 / static_cast<double>(covs.size()));
        BcdOptions o;
        o.max_iter = max_iter;
        o.seed = seed;
        const BarycenterResult r = solve_bcd(p, o);
        py::dict d;
        d["a_hat"] = r.a_hat.data();
        d["objective"] = r.objective;
        d["frechet_variance"] = r.frechet_variance;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["history"] = r.history;
        d["fixed_point_residual"] = fixed_point_residual(r.a_hat, p);
        return d;
      },
      py::arg("covs"), py::arg("weights") = py::none(), py::arg("max_iter") = 500, py::arg("seed") = py::none());

  m.def(
      "ibm_w2_analytic",
      [](int n, int k) {
        const Rational r = ibm_w2_analytic_exact(n, k);
        return py::make_tuple(r.num, r.den);
      },
      py::arg("n"), py::arg("m"), "Closed-form W2^2 as a (numerator, denominator) pair.");
  m.def(
      "ibm_w2_numeric", [](int n, int k, Index grid) { return ibm_w2_numeric(n, k, Grid::uniform(grid)); },
      py::arg("n"), py::arg("m"), py::arg("grid") = 500);
  m.def(
      "cross_gram",
      [](int n, int k, Index grid) {
        const Grid g = Grid::uniform(grid);
        const CrossGramCertificate c = cross_gram_certificate(volterra_green(n, g), volterra_green(k, g));
        py::dict d;
        d["kind"] = to_string(c.kind);
        d["asymmetry"] = c.asymmetry;
        d["min_eigenvalue"] = c.min_eigenvalue;
        return d;
      },
      py::arg("n"), py::arg("m"), py::arg("grid") = 200, "Certificate for the Volterra pair of orders n and m.");
}
