#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bwt/barycenter.hpp"
#include "bwt/geodesic.hpp"
#include "bwt/gproc.hpp"
#include "bwt/transport.hpp"
#include "matrix_io.hpp"

namespace bwt::cli {

namespace {

using Json = nlohmann::ordered_json;

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j) == 0.0 ? 0.0 : m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Config {
  double tol_rel = kDefaultTolRel;
  double tol_map = kDefaultTolMap;
  std::string report_path;
};

CovMatrix load_cov(const std::string& path, const Config& cfg) {
  const Matrix m = io::read_matrix(path);
  if (m.rows() != m.cols())
    throw InvalidInput("'" + path + "' is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                       ", expected a square matrix");
  try {
    return CovMatrix(m, cfg.tol_rel);
  } catch (const InvalidInput& e) {
    throw InvalidInput("'" + path + "': " + e.what());
  }
}

void emit(const Json& report, const Config& cfg, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  out << text;
  if (!cfg.report_path.empty()) {
    std::ofstream f(cfg.report_path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write report '" + cfg.report_path + "'");
    f << text;
  }
}

Json spd_json(const SpdReachReport& r) {
  return Json{{"spd_exists", r.spd_exists},
              {"as_unique", r.as_unique},
              {"schur_zero", r.schur_zero},
              {"range_eq", r.range_eq},
              {"trivial_intersection", r.trivial_intersection}};
}

// distance --------------------------------------------------------------

struct DistanceArgs {
  std::string a, b;
};

void cmd_distance(const DistanceArgs& args, const Config& cfg, std::ostream& out) {
  const CovMatrix a = load_cov(args.a, cfg);
  const CovMatrix b = load_cov(args.b, cfg);
  require_same_dim(a, b, "distance");
  const double w2sq = w2_squared(a, b);
  Json rep;
  rep["command"] = "distance";
  rep["dim"] = a.dim();
  rep["w2"] = std::sqrt(std::max(w2sq, 0.0));
  rep["w2_squared"] = w2sq;
  rep["trace_fidelity"] = trace_fidelity(a, b);
  rep["rank_a"] = a.rank();
  rep["rank_b"] = b.rank();
  emit(rep, cfg, out);
}

// map -------------------------------------------------------------------

struct MapArgs {
  std::string a, b;
  bool spd_canonical = false;
  std::string u12 = "det";
  std::string free_blocks = "sym0";
  bool check_only = false;
  std::string out_path;
};

void cmd_map(const MapArgs& args, const Config& cfg, std::ostream& out) {
  const CovMatrix a = load_cov(args.a, cfg);
  const CovMatrix b = load_cov(args.b, cfg);
  require_same_dim(a, b, "map");
  Json rep;
  rep["command"] = "map";
  rep["dim"] = a.dim();
  rep["rank_a"] = a.rank();
  rep["rank_b"] = b.rank();
  rep["reachable"] = is_reachable(a, b);

  if (args.check_only) {
    rep["spd"] = spd_json(spd_reachability(a, b, cfg.tol_map));
    emit(rep, cfg, out);
    return;
  }

  MapOptions opts;
  opts.tol_map = cfg.tol_map;
  opts.u12 = args.u12 == "neg" ? U12Policy::Negated : U12Policy::Deterministic;
  opts.free_blocks =
      args.spd_canonical || args.free_blocks == "spd" ? FreeBlocks::SpdCanonical : FreeBlocks::SymmetricZero;
  const TransportMap map = ot_map(a, b, opts);
  const SpdReachReport spd = spd_reachability(a, b, cfg.tol_map);

  rep["u12"] = args.u12;
  rep["free_blocks"] = opts.free_blocks == FreeBlocks::SpdCanonical ? "spd" : "sym0";
  rep["residual_transport"] = map.residual_transport;
  rep["residual_optimality"] = map.residual_optimality;
  rep["spd"] = spd_json(spd);
  rep["map"] = matrix_json(map.t);
  if (!args.out_path.empty()) {
    io::write_matrix(args.out_path, map.t);
    rep["file"] = args.out_path;
  }
  emit(rep, cfg, out);
}

// geodesic --------------------------------------------------------------

struct GeodesicArgs {
  std::string a, b;
  std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
  std::string style = "extreme";
  double s = 1.0;
  std::string out_dir;
};

void cmd_geodesic(const GeodesicArgs& args, const Config& cfg, std::ostream& out) {
  const CovMatrix a = load_cov(args.a, cfg);
  const CovMatrix b = load_cov(args.b, cfg);
  require_same_dim(a, b, "geodesic");
  ParamStyle style = ParamStyle::extreme();
  if (args.style == "zero") style = ParamStyle::zero();
  else if (args.style == "scaled") style = ParamStyle::scaled(args.s);

  const GeodesicPath path(a, b, make_param(a, b, style, cfg.tol_map), cfg.tol_map);
  const std::vector<CovMatrix> pts = sample_path(path, args.ts);
  if (!args.out_dir.empty()) std::filesystem::create_directories(args.out_dir);

  Json rep;
  rep["command"] = "geodesic";
  rep["dim"] = a.dim();
  rep["style"] = args.style;
  rep["s"] = args.style == "scaled" ? args.s : (args.style == "zero" ? 0.0 : 1.0);
  rep["param_kind"] = path.param().kind == GeodesicParam::Kind::Monge ? "monge" : "interior";
  rep["length"] = path.length();
  Json samples = Json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PointClass pc = classify_point(a, b, pts[i], args.ts[i], cfg.tol_map);
    Json row;
    row["t"] = args.ts[i];
    row["rank"] = pc.rank_gamma;
    row["schur_rank"] = pc.rank_schur;
    row["extreme"] = pc.extreme;
    row["w2_from_a"] = w2_distance(a, pts[i]);
    row["w2_to_b"] = w2_distance(pts[i], b);
    if (!args.out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "gamma_%03zu.json", i);
      const std::string file = (std::filesystem::path(args.out_dir) / name).string();
      io::write_matrix(file, pts[i].data());
      row["file"] = file;
    }
    row["matrix"] = matrix_json(pts[i].data());
    samples.push_back(std::move(row));
  }
  rep["samples"] = std::move(samples);
  Matrix table(static_cast<Index>(pts.size()), static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      table(static_cast<Index>(i), static_cast<Index>(j)) = i == j ? 0.0 : w2_distance(pts[i], pts[j]);
  rep["distance_table"] = matrix_json(table);
  emit(rep, cfg, out);
}

// barycenter ------------------------------------------------------------

struct BarycenterArgs {
  std::vector<std::string> files;
  std::vector<double> weights;
  int max_iter = 500;
  double tol_obj = -1.0;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string log_path;
};

bool is_midpoint_pair(const BarycenterProblem& p) {
  if (p.dim() != 2 || p.covs.size() != 2 || p.weights[0] != p.weights[1]) return false;
  const Matrix e1 = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  const Matrix e2 = (Matrix(2, 2) << 0, 0, 0, 1).finished();
  const Matrix& x = p.covs[0].data();
  const Matrix& y = p.covs[1].data();
  return (x == e1 && y == e2) || (x == e2 && y == e1);
}

void cmd_barycenter(const BarycenterArgs& args, const Config& cfg, std::ostream& out) {
  BarycenterProblem problem;
  for (const std::string& f : args.files) problem.covs.push_back(load_cov(f, cfg));
  if (args.weights.empty()) {
    problem.weights.assign(problem.covs.size(), 1.0 / static_cast<double>(problem.covs.size()));
  } else {
    if (args.weights.size() != problem.covs.size())
      throw InvalidInput("got " + std::to_string(args.weights.size()) + " weights for " +
                         std::to_string(problem.covs.size()) + " matrices");
    double total = 0.0;
    for (double w : args.weights) {
      if (!(w > 0.0)) throw InvalidInput("weights must be positive");
      total += w;
    }
    for (double w : args.weights) problem.weights.push_back(w / total);
  }
  BcdOptions opts;
  opts.max_iter = args.max_iter;
  opts.tol_obj = args.tol_obj;
  opts.seed = args.seed;
  const BarycenterResult res = solve_bcd(problem, opts);

  double align_min = 0.0;
  for (const Matrix& g : res.greens)
    align_min = std::min(align_min, min_eigenvalue(res.g_hat.transpose() * g));

  Json rep;
  rep["command"] = "barycenter";
  rep["dim"] = problem.dim();
  rep["m"] = problem.covs.size();
  rep["weights"] = problem.weights;
  rep["objective"] = res.objective;
  rep["frechet_variance"] = res.frechet_variance;
  rep["iterations"] = res.iterations;
  rep["converged"] = res.converged;
  rep["fixed_point_residual"] = fixed_point_residual(res.a_hat, problem);
  rep["alignment_min_eigenvalue"] = align_min;
  rep["properly_aligned"] = align_min >= -1e-9 * (1.0 + problem.weighted_trace());
  rep["a_hat"] = matrix_json(res.a_hat.data());
  rep["history"] = res.history;
  if (is_midpoint_pair(problem)) {
    // Every barycenter of this pair is [[1/4, s/4], [s/4, 1/4]] with |s| <= 1.
    const Matrix& x = res.a_hat.data();
    const double s = 4.0 * x(0, 1);
    Json fam;
    fam["s"] = s;
    fam["member"] = std::abs(x(0, 0) - 0.25) <= 1e-9 && std::abs(x(1, 1) - 0.25) <= 1e-9 &&
                    std::abs(x(0, 1) - x(1, 0)) <= 1e-12 && std::abs(s) <= 1.0 + 1e-9;
    rep["midpoint_family"] = std::move(fam);
  }
  if (!args.out_path.empty()) {
    io::write_matrix(args.out_path, res.a_hat.data());
    rep["file"] = args.out_path;
  }
  if (!args.log_path.empty()) {
    std::ofstream log(args.log_path, std::ios::binary);
    if (!log) throw InvalidInput("cannot write '" + args.log_path + "'");
    log << "update,objective\n";
    for (std::size_t k = 0; k < res.history.size(); ++k) log << k << "," << io::format_double(res.history[k]) << "\n";
  }
  emit(rep, cfg, out);
}

// gp --------------------------------------------------------------------

struct GpArgs {
  std::vector<int> orders;
  int m = 500;
  bool refine = false;
};

void cmd_gp(const GpArgs& args, const Config& cfg, std::ostream& out) {
  if (args.orders.empty() || args.orders.size() % 2 != 0)
    throw InvalidInput("gp expects pairs of integration orders, e.g. 'gp 1 2 1 3'");
  if (args.m < 1) throw InvalidInput("--m must be positive");
  const Grid grid = Grid::uniform(args.m);
  std::optional<Grid> fine;
  if (args.refine) fine = Grid::uniform(2 * args.m);
  Json rows = Json::array();
  for (std::size_t k = 0; k < args.orders.size(); k += 2) {
    const int n = args.orders[k], m = args.orders[k + 1];
    const Rational exact = ibm_w2_analytic_exact(n, m);
    const double analytic = exact.to_double();
    const double numeric = ibm_w2_numeric(n, m, grid);
    Json row;
    row["n"] = n;
    row["m"] = m;
    row["grid"] = args.m;
    row["analytic"] = analytic;
    row["analytic_exact"] = std::to_string(exact.num) + "/" + std::to_string(exact.den);
    row["numeric"] = numeric;
    row["abs_diff"] = std::abs(numeric - analytic);
    if (fine) {
      const double numeric2 = ibm_w2_numeric(n, m, *fine);
      row["numeric_refined"] = numeric2;
      row["abs_diff_refined"] = std::abs(numeric2 - analytic);
    }
    rows.push_back(std::move(row));
  }
  Json rep;
  rep["command"] = "gp";
  rep["rows"] = std::move(rows);
  emit(rep, cfg, out);
}

std::optional<double> env_tol_rel() {
  const char* v = std::getenv("BWT_TOL_REL");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const double x = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(x > 0.0)) throw InvalidInput(std::string("invalid BWT_TOL_REL '") + v + "'");
  return x;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal transport between centered Gaussians with singular covariances", "bwt"};
  app.require_subcommand(1);
  Config cfg;
  std::optional<double> tol_rel_flag;
  app.add_option("--tol-rel", tol_rel_flag, "relative rank/PSD tolerance (env BWT_TOL_REL)");
  app.add_option("--tol-map", cfg.tol_map, "tolerance for map residuals and Schur complements")
      ->check(CLI::PositiveNumber);
  app.add_option("--report", cfg.report_path, "also write the JSON report to this file");

  DistanceArgs dist;
  auto* sc_dist = app.add_subcommand("distance", "W2 distance between two covariances");
  sc_dist->add_option("a", dist.a)->required();
  sc_dist->add_option("b", dist.b)->required();

  MapArgs map;
  auto* sc_map = app.add_subcommand("map", "optimal transport map from A to B");
  sc_map->add_option("a", map.a)->required();
  sc_map->add_option("b", map.b)->required();
  sc_map->add_flag("--spd-canonical", map.spd_canonical, "minimal-rank PSD map (requires B/A = 0)");
  sc_map->add_option("--u12", map.u12, "partial isometry choice")->check(CLI::IsMember({"det", "neg"}));
  sc_map->add_option("--free", map.free_blocks, "completion of the null(A) blocks")
      ->check(CLI::IsMember({"sym0", "spd"}));
  sc_map->add_flag("--check-only", map.check_only, "only report the PSD reachability conditions");
  sc_map->add_option("--out", map.out_path, "write T as a matrix file");

  GeodesicArgs geo;
  auto* sc_geo = app.add_subcommand("geodesic", "sample a constant-speed geodesic");
  sc_geo->add_option("a", geo.a)->required();
  sc_geo->add_option("b", geo.b)->required();
  sc_geo->add_option("--t", geo.ts, "sample times, comma separated")->delimiter(',');
  sc_geo->add_option("--style", geo.style, "parameter style")->check(CLI::IsMember({"extreme", "zero", "scaled"}));
  sc_geo->add_option("--s", geo.s, "scale for --style scaled")->check(CLI::Range(-1.0, 1.0));
  sc_geo->add_option("--out-dir", geo.out_dir, "directory for one matrix file per sample");

  BarycenterArgs bary;
  auto* sc_bary = app.add_subcommand("barycenter", "weighted barycenter by block coordinate ascent");
  sc_bary->add_option("files", bary.files)->required();
  sc_bary->add_option("--weights", bary.weights, "weights, comma separated (normalized)")->delimiter(',');
  sc_bary->add_option("--max-iter", bary.max_iter)->check(CLI::PositiveNumber);
  sc_bary->add_option("--tol-obj", bary.tol_obj, "stop when a sweep gains less (default 1e-10 sum p_i tr A_i)");
  sc_bary->add_option("--seed", bary.seed, "random orthogonal rotation of the initial factors");
  sc_bary->add_option("--out", bary.out_path, "write the barycenter as a matrix file");
  sc_bary->add_option("--log", bary.log_path, "write the objective after every update as CSV");

  GpArgs gp;
  auto* sc_gp = app.add_subcommand("gp", "integrated Brownian motions: closed form vs grid");
  sc_gp->add_option("orders", gp.orders, "pairs of integration orders")->required();
  sc_gp->add_option("--m", gp.m, "grid size");
  sc_gp->add_flag("--refine", gp.refine, "also evaluate on the 2m grid");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("bwt");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    const std::optional<double> env = env_tol_rel();
    if (tol_rel_flag) {
      if (!(*tol_rel_flag > 0.0)) throw InvalidInput("--tol-rel must be positive");
      cfg.tol_rel = *tol_rel_flag;
    } else if (env) {
      cfg.tol_rel = *env;
    }
    if (sc_dist->parsed()) cmd_distance(dist, cfg, out);
    else if (sc_map->parsed()) cmd_map(map, cfg, out);
    else if (sc_geo->parsed()) cmd_geodesic(geo, cfg, out);
    else if (sc_bary->parsed()) cmd_barycenter(bary, cfg, out);
    else if (sc_gp->parsed()) cmd_gp(gp, cfg, out);
    return kOk;
  } catch (const Unreachable& e) {
    err << "bwt: unreachable: " << e.what() << "\n";
    return kUnreachable;
  } catch (const NoSpdMap& e) {
    err << "bwt: no PSD map: " << e.what() << "\n";
    return kNoSpdMap;
  } catch (const NumericalInconsistency& e) {
    err << "bwt: numerical inconsistency: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    err << "bwt: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "bwt: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace bwt::cli
