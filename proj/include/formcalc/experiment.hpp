#ifndef FORMCALC_EXPERIMENT_HPP
#define FORMCALC_EXPERIMENT_HPP

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "formcalc/opnorm.hpp"
#include "formcalc/serialization.hpp"

namespace formcalc {

/// Parsed experiment description (CLI-facing schema).
struct ExperimentConfig {
  std::string name;
  SpaceDescriptor space;
  std::optional<Eigen::MatrixXd> frame_vertices;  // whitney: defaults to the reference simplex
  std::optional<Body> body;                       // defaults per space family
  bool whitney_face_currents = false;
  std::vector<AveragingCurrent> currents;
  Eigen::VectorXd weights;  // empty: unit weights
  std::optional<MapSpec> map;
  EstimatorOpts options;
  std::vector<double> perturb_eps;
  std::vector<std::uint64_t> perturb_seeds;
  int trials = 100;  // batch size for thm2 / map-bound sampling
};

inline ExperimentConfig parse_experiment(const json& j) {
  ExperimentConfig ec;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ec.name = j.value("experiment", "unnamed");
  if (!j.contains("space")) throw ConfigError("config: missing 'space'");
  ec.space = space_descriptor_from_json(j["space"]);

  if (j.contains("frame")) ec.frame_vertices = matrix_from_json(j["frame"]);
  if (j.contains("body")) ec.body = body_from_json(j["body"]);

  if (j.contains("currents")) {
    const json& c = j["currents"];
    if (c.is_string() && c.get<std::string>() == "whitney-faces") {
      ec.whitney_face_currents = true;
    } else if (c.is_array()) {
      for (const auto& item : c) ec.currents.push_back(current_from_json(item));
    } else {
      throw ConfigError("config: 'currents' must be an array or \"whitney-faces\"");
    }
  } else if (ec.space.family == "whitney") {
    ec.whitney_face_currents = true;
  } else {
    throw ConfigError("config: polynomial spaces need explicit 'currents'");
  }

  if (j.contains("weights")) {
    if (j["weights"].is_number()) {
      const double w = j["weights"].get<double>();
      if (w <= 0.0) throw ConfigError("config: weights must be positive");
      ec.weights = Eigen::VectorXd::Constant(1, w);  // broadcast at build
    } else {
      ec.weights = vector_from_json(j["weights"]);
    }
  }

  if (j.contains("map")) ec.map = map_from_json(j["map"]);
  if (j.contains("options")) ec.options = estimator_opts_from_json(j["options"]);
  if (j.contains("perturb")) {
    const json& p = j["perturb"];
    if (p.contains("eps"))
      for (const auto& e : p["eps"]) ec.perturb_eps.push_back(e.get<double>());
    if (p.contains("seeds"))
      for (const auto& s : p["seeds"]) ec.perturb_seeds.push_back(s.get<std::uint64_t>());
  }
  ec.trials = j.value("trials", 100);
  if (ec.trials < 1) throw ConfigError("config: 'trials' must be positive");
  return ec;
}

/// Assembled runtime objects of an experiment.
struct BuiltExperiment {
  CurrentConfig cfg;
  Body body;
  std::optional<BarycentricFrame> frame;
};

inline BuiltExperiment build_experiment(const ExperimentConfig& ec) {
  BuiltExperiment be{CurrentConfig{}, Body::reference_simplex(ec.space.n), std::nullopt};

  if (ec.space.family == "whitney") {
    Eigen::MatrixXd verts;
    if (ec.frame_vertices) {
      verts = *ec.frame_vertices;
    } else {
      verts = Eigen::MatrixXd::Zero(ec.space.n, ec.space.n + 1);
      for (int i = 0; i < ec.space.n; ++i) verts(i, i + 1) = 1.0;
    }
    be.frame.emplace(verts);
    be.cfg.space = whitney_basis(*be.frame, ec.space.k);
    if (!ec.body) be.body = Body::polytope(verts);
  } else {
    be.cfg.space = polynomial_basis(ec.space.n, ec.space.k, ec.space.r);
  }
  if (ec.body) be.body = *ec.body;

  if (ec.whitney_face_currents) {
    if (!be.frame) throw ConfigError("config: \"whitney-faces\" needs a whitney space");
    for (const auto& f : whitney_faces(*be.frame, ec.space.k))
      be.cfg.currents.emplace_back(AveragingCurrent(f));
  } else {
    be.cfg.currents = ec.currents;
  }

  const int M = be.cfg.size();
  if (ec.weights.size() == 0) {
    be.cfg.weights = Eigen::VectorXd::Ones(M);
  } else if (ec.weights.size() == 1) {
    be.cfg.weights = Eigen::VectorXd::Constant(M, ec.weights[0]);
  } else {
    be.cfg.weights = ec.weights;
  }
  be.cfg.quad_degree = ec.options.quad_degree;
  be.cfg.validate();
  return be;
}

// --- commands ----------------------------------------------------------------

namespace detail {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

inline json result_skeleton(const std::string& command, const ExperimentConfig& ec) {
  return json{{"experiment", ec.name},
              {"command", command},
              {"seed", ec.options.seed},
              {"budget", to_json(ec.options)},
              {"results", json::object()}};
}

}  // namespace detail

inline json cmd_whitney_check(const ExperimentConfig& ec) {
  detail::Stopwatch sw;
  if (ec.space.family != "whitney")
    throw ConfigError("whitney-check: requires a whitney space");
  const BuiltExperiment be = build_experiment(ec);
  const Eigen::MatrixXd V = vandermonde(be.cfg);
  const Eigen::MatrixXd G = gram(V, be.cfg.weights);
  const int N = be.cfg.space.dimension();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  json rec = detail::result_skeleton("whitney-check", ec);
  rec["results"]["dimension"] = N;
  rec["results"]["max_vandermonde_deviation"] = (V - I).cwiseAbs().maxCoeff();
  rec["results"]["max_gram_deviation"] = (G - I).cwiseAbs().maxCoeff();
  rec["wall_time_s"] = sw.seconds();
  return rec;
}

inline json cmd_lebesgue(const ExperimentConfig& ec) {
  detail::Stopwatch sw;
  const BuiltExperiment be = build_experiment(ec);
  const FittedBasis fb = orthonormalize(be.cfg);
  const SupremumEstimate est = lebesgue_estimate(be.cfg, fb, be.body, ec.options);
  json rec = detail::result_skeleton("lebesgue", ec);
  rec["results"]["lebesgue"] = est.value;
  rec["results"]["estimate"] = to_json(est);
  rec["wall_time_s"] = sw.seconds();
  return rec;
}

inline json cmd_opnorm(const ExperimentConfig& ec) {
  detail::Stopwatch sw;
  const BuiltExperiment be = build_experiment(ec);
  const FittedBasis fb = orthonormalize(be.cfg);
  OpNormOpts opts;
  opts.search = ec.options;
  opts.seed = ec.options.seed;
  const OpNormEstimate est = operator_norm_lower_bound(be.cfg, fb, be.body, opts);
  json rec = detail::result_skeleton("opnorm", ec);
  rec["results"]["opnorm_lower_bound"] = est.value;
  rec["results"]["best_bump_value"] = est.best_bump_value;
  rec["results"]["best_poly_value"] = est.best_poly_value;
  rec["wall_time_s"] = sw.seconds();
  return rec;
}

inline json cmd_thm1(const ExperimentConfig& ec) {
  detail::Stopwatch sw;
  const BuiltExperiment be = build_experiment(ec);
  const FittedBasis fb = orthonormalize(be.cfg);

  const SupremumEstimate first = lebesgue_estimate(be.cfg, fb, be.body, ec.options);
  OpNormOpts oo;
  oo.search = ec.options;
  oo.seed = ec.options.seed;
  std::vector<AveragingCurrent> targets;
  if (first.witness.current) targets.push_back(*first.witness.current);
  const OpNormEstimate op = operator_norm_lower_bound(be.cfg, fb, be.body, oo, targets);

  // re-estimate L seeded with the op-norm witnesses: the inequality
  // opnorm <= L then holds per trial current by construction
  const SupremumEstimate leb =
      lebesgue_estimate(be.cfg, fb, be.body, ec.options, op.witnesses);

  json rec = detail::result_skeleton("thm1", ec);
  rec["results"]["lebesgue"] = std::max(first.value, leb.value);
  rec["results"]["opnorm_lower_bound"] = op.value;
  rec["results"]["ratio"] = op.value / std::max(std::max(first.value, leb.value), 1e-300);
  rec["results"]["estimate"] = to_json(leb);
  rec["wall_time_s"] = sw.seconds();
  return rec;
}

inline json cmd_thm2(const ExperimentConfig& ec) {
  detail::Stopwatch sw;
  if (!ec.map) throw ConfigError("thm2: requires an affine 'map'");
  const BuiltExperiment be = build_experiment(ec);
  const FittedBasis fb_ref = orthonormalize(be.cfg);
  const CurrentConfig mapped = renormalize(*ec.map, be.cfg);
  const FittedBasis fb_mapped = orthonormalize(mapped);
  const TransferFactors tf = transfer_factors(*ec.map, ec.space.k);

  // physical body: image of the reference body under the map
  const auto [lo, hi] = be.body.bounding_box();
  Eigen::MatrixXd hull;
  if (be.body.kind() == Body::Kind::Polytope) {
    hull = be.body.polytope_vertices();
  } else if (be.body.kind() == Body::Kind::ReferenceSimplex) {
    hull = Eigen::MatrixXd::Zero(be.body.dim(), be.body.dim() + 1);
    for (int i = 0; i < be.body.dim(); ++i) hull(i, i + 1) = 1.0;
  } else {
    const int n = be.body.dim();
    hull = Eigen::MatrixXd(n, 1 << n);
    for (int m = 0; m < (1 << n); ++m)
      for (int d = 0; d < n; ++d) hull(d, m) = (m & (1 << d)) ? hi[d] : lo[d];
  }
  Eigen::MatrixXd mapped_hull(hull.rows(), hull.cols());
  for (int c = 0; c < hull.cols(); ++c) mapped_hull.col(c) = ec.map->apply(hull.col(c));
  const Body body_phys = Body::polytope(mapped_hull);

  // per-sample chain inequality on a batch of random physical currents
  long violations = 0;
  double max_gap = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < ec.trials; ++t) {
    auto rng = substream(ec.options.seed, 7000 + static_cast<std::uint64_t>(t));
    AveragingCurrent T = sample_averaging_current(body_phys, ec.space.k, rng);
    const Thm2Sample s = theorem2_chain_check(*ec.map, be.cfg, fb_ref, mapped, fb_mapped, T);
    const double margin = s.rhs - s.lhs;
    worst_margin = std::min(worst_margin, margin);
    if (s.lhs > s.rhs + 1e-9) ++violations;
    max_gap = std::max(max_gap, s.lhs - s.rhs);
  }

  // witness-level transfer of the Lebesgue estimates
  const SupremumEstimate leb_ref = lebesgue_estimate(be.cfg, fb_ref, be.body, ec.options);
  const SupremumEstimate leb_mapped = lebesgue_estimate(mapped, fb_mapped, body_phys, ec.options);

  json rec = detail::result_skeleton("thm2", ec);
  rec["results"]["thm2factor"] = tf.thm2factor;
  rec["results"]["upper_factor"] = tf.upper;
  rec["results"]["lower_inv_factor"] = tf.lower_inv;
  rec["results"]["cond_bound"] = tf.cond_bound;
  rec["results"]["chain_trials"] = ec.trials;
  rec["results"]["chain_violations"] = violations;
  rec["results"]["chain_worst_margin"] = worst_margin;
  rec["results"]["chain_max_gap"] = max_gap;
  rec["results"]["lebesgue_reference"] = leb_ref.value;
  rec["results"]["lebesgue_mapped"] = leb_mapped.value;
  rec["results"]["transfer_bound"] = tf.thm2factor * leb_ref.value;
  rec["wall_time_s"] = sw.seconds();
  return rec;
}

inline json cmd_perturb(const ExperimentConfig& ec) {
  detail::Stopwatch sw;
  const BuiltExperiment be = build_experiment(ec);
  std::vector<double> eps = ec.perturb_eps;
  if (eps.empty()) eps = {1e-1, 1e-2, 1e-3};
  std::vector<std::uint64_t> seeds = ec.perturb_seeds;
  if (seeds.empty()) seeds = {1, 2, 3, 4, 5};

  json rows = json::array();
  for (std::uint64_t s : seeds) {
    const auto probe = lebesgue_continuity_probe(be.cfg, be.body, eps, ec.options, s);
    for (const auto& row : probe) {
      rows.push_back(json{{"seed", s},
                          {"eps", row.eps},
                          {"determining", row.determining},
                          {"lebesgue", row.determining ? json(row.lebesgue) : json(nullptr)},
                          {"deviation", row.determining ? json(row.deviation) : json(nullptr)}});
    }
  }
  json rec = detail::result_skeleton("perturb", ec);
  rec["results"]["rows"] = rows;
  rec["wall_time_s"] = sw.seconds();
  return rec;
}

inline json cmd_map_bound(const ExperimentConfig& ec) {
  detail::Stopwatch sw;
  if (!ec.map) throw ConfigError("map-bound: requires an affine 'map'");
  const BuiltExperiment be = build_experiment(ec);
  const TransferFactors tf = transfer_factors(*ec.map, ec.space.k);

  long violations = 0;
  double worst_rel = 0.0;
  for (int t = 0; t < ec.trials; ++t) {
    auto rng = substream(ec.options.seed, 9000 + static_cast<std::uint64_t>(t));
    const OrientedSimplex S = sample_simplex(be.body, ec.space.k, rng);
    const MeasureSandwich ms = measure_sandwich_check(*ec.map, S);
    const double scale = std::max({std::abs(ms.lower), std::abs(ms.upper), 1e-300});
    if (ms.actual < ms.lower - 1e-9 * scale || ms.actual > ms.upper + 1e-9 * scale) ++violations;
    worst_rel = std::max({worst_rel, (ms.lower - ms.actual) / scale, (ms.actual - ms.upper) / scale});
  }

  json rec = detail::result_skeleton("map-bound", ec);
  rec["results"]["thm2factor"] = tf.thm2factor;
  rec["results"]["upper_factor"] = tf.upper;
  rec["results"]["lower_inv_factor"] = tf.lower_inv;
  rec["results"]["cond_bound"] = tf.cond_bound;
  rec["results"]["sandwich_trials"] = ec.trials;
  rec["results"]["sandwich_violations"] = violations;
  rec["results"]["sandwich_worst_rel"] = worst_rel;
  rec["wall_time_s"] = sw.seconds();
  return rec;
}

inline json run_command(const std::string& command, const ExperimentConfig& ec) {
  if (command == "whitney-check") return cmd_whitney_check(ec);
  if (command == "lebesgue") return cmd_lebesgue(ec);
  if (command == "opnorm") return cmd_opnorm(ec);
  if (command == "thm1") return cmd_thm1(ec);
  if (command == "thm2") return cmd_thm2(ec);
  if (command == "perturb") return cmd_perturb(ec);
  if (command == "map-bound") return cmd_map_bound(ec);
  throw ConfigError("unknown subcommand '" + command + "'");
}

}  // namespace formcalc

#endif
