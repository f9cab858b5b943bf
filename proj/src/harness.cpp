#include "heatdecon/harness.hpp"

#include "heatdecon/error.hpp"
#include "heatdecon/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

namespace heatdecon {

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kConfigInvalid, what);
}

std::vector<Edge> weighted(std::vector<std::pair<Vertex, Vertex>> pairs, const GraphSpec& spec) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  if (spec.weight_range) {
    auto [lo, hi] = *spec.weight_range;
    if (!(lo > 0.0) || !(hi >= lo))
      throw Error(ErrorCode::kGenerationFailed, "weight_range must satisfy 0 < lo <= hi");
    // Separate stream from the topology draw so weights don't shift edge sets.
    Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto [u, v] : pairs) edges.push_back({u, v, dist(rng)});
  } else {
    if (!(spec.weight > 0.0)) throw Error(ErrorCode::kGenerationFailed, "weight must be positive");
    for (auto [u, v] : pairs) edges.push_back({u, v, spec.weight});
  }
  return edges;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kGenerationFailed, what);
}

template <typename T>
bool strictly_increasing(const std::vector<T>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<T>()) == v.end();
}

}  // namespace

WeightedGraph generate_graph(const GraphSpec& spec) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  const auto& kind = spec.generator;
  if (kind == "path") {
    require(spec.n >= 1, "path needs n >= 1");
    for (Vertex i = 0; i + 1 < spec.n; ++i) pairs.emplace_back(i, i + 1);
    return build_graph(spec.n, weighted(std::move(pairs), spec));
  }
  if (kind == "cycle") {
    require(spec.n >= 3, "cycle needs n >= 3");
    for (Vertex i = 0; i < spec.n; ++i) pairs.emplace_back(i, (i + 1) % spec.n);
    return build_graph(spec.n, weighted(std::move(pairs), spec));
  }
  if (kind == "grid") {
    require(spec.rows >= 1 && spec.cols >= 1, "grid needs rows, cols >= 1");
    for (Vertex r = 0; r < spec.rows; ++r)
      for (Vertex c = 0; c < spec.cols; ++c) {
        const Vertex x = r * spec.cols + c;
        if (c + 1 < spec.cols) pairs.emplace_back(x, x + 1);
        if (r + 1 < spec.rows) pairs.emplace_back(x, x + spec.cols);
      }
    return build_graph(spec.rows * spec.cols, weighted(std::move(pairs), spec));
  }
  if (kind == "complete") {
    require(spec.n >= 1, "complete graph needs n >= 1");
    for (Vertex i = 0; i < spec.n; ++i)
      for (Vertex j = i + 1; j < spec.n; ++j) pairs.emplace_back(i, j);
    return build_graph(spec.n, weighted(std::move(pairs), spec));
  }
  if (kind == "erdos_renyi") {
    require(spec.n >= 1, "erdos_renyi needs n >= 1");
    require(spec.p > 0.0 && spec.p <= 1.0, "erdos_renyi needs 0 < p <= 1");
    Rng rng(spec.seed);
    std::bernoulli_distribution coin(spec.p);
    for (int attempt = 0; attempt < 100; ++attempt) {
      pairs.clear();
      for (Vertex i = 0; i < spec.n; ++i)
        for (Vertex j = i + 1; j < spec.n; ++j)
          if (coin(rng)) pairs.emplace_back(i, j);
      try {
        return build_graph(spec.n, weighted(pairs, spec));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDisconnectedGraph) throw;
      }
    }
    throw Error(ErrorCode::kGenerationFailed,
                "no connected G(" + std::to_string(spec.n) + ", " + std::to_string(spec.p) +
                    ") sample in 100 draws");
  }
  throw Error(ErrorCode::kGenerationFailed, "unknown generator '" + kind + "'");
}

std::vector<Vertex> place_support(const CompatibleMetric& m, Vertex j, std::uint64_t seed) {
  const Vertex n = m.dist().rows();
  if (j < 1 || j > n)
    throw Error(ErrorCode::kInvalidArgument,
                "support size " + std::to_string(j) + " not in [1, " + std::to_string(n) + "]");
  Rng rng(seed);
  const Vertex anchor = std::uniform_int_distribution<Vertex>(0, n - 1)(rng);

  // maxCoeff returns the first maximizer, so ties go to the lower index.
  Vertex first = 0;
  m.dist().row(anchor).maxCoeff(&first);

  std::vector<Vertex> chosen{first};
  Eigen::VectorXd nearest = m.dist().row(first).transpose();
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  taken[static_cast<std::size_t>(first)] = 1;
  while (static_cast<Vertex>(chosen.size()) < j) {
    Vertex next = -1;
    for (Vertex y = 0; y < n; ++y)
      if (!taken[static_cast<std::size_t>(y)] && (next < 0 || nearest[y] > nearest[next])) next = y;
    chosen.push_back(next);
    taken[static_cast<std::size_t>(next)] = 1;
    nearest = nearest.cwiseMin(m.dist().row(next).transpose());
  }
  return chosen;
}

Eigen::VectorXd draw_noise(Eigen::Index n, double eps, NoiseModel model, Rng& rng) {
  Eigen::VectorXd w(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& x : w) x = normal(rng);
  if (eps == 0.0) return Eigen::VectorXd::Zero(n);
  if (model == NoiseModel::kSphere) return eps * w / w.norm();
  w *= eps / std::sqrt(static_cast<double>(n));
  if (w.norm() > eps) w *= eps / w.norm();
  return w;
}

ExperimentConfig parse_config(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");

  static const std::vector<std::string> kSections{"graph", "support", "signal", "time",
                                                   "noise", "certificate", "solver", "output"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (std::find(kSections.begin(), kSections.end(), it.key()) == kSections.end())
      config_error("unknown key '" + it.key() + "'");

  ExperimentConfig cfg;
  try {
    const json& g = doc.at("graph");
    if (g.contains("file")) cfg.graph_file = g.at("file").get<std::string>();
    if (g.contains("generator")) {
      GraphSpec spec;
      spec.generator = g.at("generator").get<std::string>();
      spec.n = g.value("n", Vertex{0});
      spec.rows = g.value("rows", Vertex{0});
      spec.cols = g.value("cols", Vertex{0});
      spec.p = g.value("p", 0.0);
      spec.seed = g.value("seed", std::uint64_t{0});
      spec.weight = g.value("weight", 1.0);
      if (g.contains("weight_range")) {
        const auto range = g.at("weight_range").get<std::vector<double>>();
        if (range.size() != 2) config_error("graph.weight_range must be [lo, hi]");
        spec.weight_range = std::make_pair(range[0], range[1]);
      }
      cfg.graph_spec = spec;
    }

    const json& s = doc.at("support");
    if (s.contains("vertices")) cfg.support = s.at("vertices").get<std::vector<Vertex>>();
    cfg.support_size = s.value("j", Vertex{0});
    cfg.support_seed = s.value("seed", std::uint64_t{0});
    if (s.contains("min_separation")) cfg.min_separation_target = s.at("min_separation").get<double>();

    if (doc.contains("signal")) {
      const json& sig = doc.at("signal");
      if (sig.contains("coeffs")) cfg.coeffs = sig.at("coeffs").get<std::vector<double>>();
      cfg.signal_seed = sig.value("seed", std::uint64_t{0});
      if (sig.contains("magnitude_range")) {
        const auto range = sig.at("magnitude_range").get<std::vector<double>>();
        if (range.size() != 2) config_error("signal.magnitude_range must be [lo, hi]");
        cfg.magnitude_range = {range[0], range[1]};
      }
    }

    const json& t = doc.at("time");
    const std::string mode = t.value("mode", std::string("fraction"));
    if (mode == "fraction") cfg.time_mode = TimeMode::kFractionOfMax;
    else if (mode == "absolute") cfg.time_mode = TimeMode::kAbsolute;
    else config_error("time.mode must be 'fraction' or 'absolute'");
    cfg.times = t.at("values").get<std::vector<double>>();

    if (doc.contains("noise")) {
      const json& nz = doc.at("noise");
      if (nz.contains("eps")) {
        const json& e = nz.at("eps");
        cfg.noise_levels = e.is_array() ? e.get<std::vector<double>>()
                                        : std::vector<double>{e.get<double>()};
      }
      const std::string model = nz.value("model", std::string("sphere"));
      if (model == "sphere") cfg.noise_model = NoiseModel::kSphere;
      else if (model == "gaussian") cfg.noise_model = NoiseModel::kGaussian;
      else config_error("noise.model must be 'sphere' or 'gaussian'");
      cfg.noise_seed = nz.value("seed", std::uint64_t{0});
      cfg.repeats = nz.value("repeats", 1);
    }

    cfg.build_certificate = doc.value("certificate", true);

    if (doc.contains("solver")) {
      const json& so = doc.at("solver");
      cfg.solver.gap_tol = so.value("gap_tol", cfg.solver.gap_tol);
      cfg.solver.max_iter = so.value("max_iter", cfg.solver.max_iter);
      cfg.solver.rho = so.value("rho", cfg.solver.rho);
      cfg.solver.relaxation = so.value("relaxation", cfg.solver.relaxation);
    }
    if (doc.contains("output")) {
      const json& o = doc.at("output");
      cfg.csv_path = o.value("csv", std::string());
      cfg.json_path = o.value("json", std::string());
    }
  } catch (const json::exception& e) {
    config_error(std::string("schema violation: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.graph_spec.has_value() == cfg.graph_file.has_value())
    config_error("graph needs exactly one of 'generator' or 'file'");
  if (cfg.support.empty() == (cfg.support_size == 0))
    config_error("support needs exactly one of 'vertices' or 'j'");
  if (cfg.support_size < 0) config_error("support.j must be positive");
  if (!cfg.coeffs.empty()) {
    const auto j = cfg.support.empty() ? static_cast<std::size_t>(cfg.support_size) : cfg.support.size();
    if (cfg.coeffs.size() != j) config_error("signal.coeffs must have one entry per support vertex");
    for (double c : cfg.coeffs)
      if (c == 0.0 || !std::isfinite(c)) config_error("signal.coeffs must be finite and nonzero");
  }
  auto [lo, hi] = cfg.magnitude_range;
  if (!(lo > 0.0) || !(hi >= lo)) config_error("signal.magnitude_range must satisfy 0 < lo <= hi");
  if (cfg.times.empty() || !strictly_increasing(cfg.times))
    config_error("time.values must be nonempty and strictly increasing");
  for (double t : cfg.times)
    if (!(t >= 0.0) || !std::isfinite(t)) config_error("time.values must be finite and nonnegative");
  if (cfg.noise_levels.empty() || !strictly_increasing(cfg.noise_levels))
    config_error("noise.eps must be nonempty and strictly increasing");
  for (double e : cfg.noise_levels)
    if (!(e >= 0.0) || !std::isfinite(e)) config_error("noise.eps must be finite and nonnegative");
  if (cfg.repeats < 1) config_error("noise.repeats must be at least 1");
  if (!(cfg.solver.gap_tol > 0.0) || cfg.solver.max_iter < 0 || !(cfg.solver.rho > 0.0) ||
      !(cfg.solver.relaxation > 0.0 && cfg.solver.relaxation < 2.0))
    config_error("solver options out of range");
}

bool ExperimentResult::any_failure() const {
  return std::any_of(records.begin(), records.end(), [](const TrialRecord& r) { return r.failed(); });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);

  std::optional<WeightedGraph> graph;
  std::optional<CompatibleMetric> metric;
  if (cfg.graph_spec) {
    graph = generate_graph(*cfg.graph_spec);
    metric = compatible_metric(*graph);
  } else {
    auto file = io::read_graph_file(*cfg.graph_file);
    metric = file.resolve_metric();
    graph = std::move(file.graph);
  }
  if (graph->size() < 2) config_error("experiments need at least two vertices");

  const auto spectrum = std::make_shared<const SpectralData>(decompose(laplacian(*graph)));
  const GraphConstants constants = graph_constants(*spectrum, *metric);

  ExperimentResult out;
  out.n_vertices = graph->size();
  try {
    out.support = cfg.support.empty() ? place_support(*metric, cfg.support_size, cfg.support_seed)
                                      : cfg.support;
    validate_support(out.support, graph->size());
  } catch (const Error& e) {
    config_error(e.what());
  }
  const SupportProfile profile = support_profile(*metric, out.support);
  if (cfg.min_separation_target && profile.d_min < *cfg.min_separation_target)
    config_error("greedy placement reached separation " + io::format_double(profile.d_min) +
                 " below the requested " + io::format_double(*cfg.min_separation_target));

  out.g_true = Eigen::VectorXd::Zero(graph->size());
  if (!cfg.coeffs.empty()) {
    for (std::size_t i = 0; i < out.support.size(); ++i) out.g_true[out.support[i]] = cfg.coeffs[i];
  } else {
    Rng rng(cfg.signal_seed);
    std::uniform_real_distribution<double> magnitude(cfg.magnitude_range.first,
                                                     cfg.magnitude_range.second);
    std::bernoulli_distribution coin(0.5);
    for (auto v : out.support) {
      const double m = magnitude(rng);
      out.g_true[v] = coin(rng) ? m : -m;
    }
  }
  const SignPattern signs = SignPattern::of(out.g_true, out.support);
  out.t_max = max_admissible_time(constants, profile);

  std::vector<double> times;
  for (double v : cfg.times) times.push_back(cfg.time_mode == TimeMode::kAbsolute ? v : v * out.t_max);

  std::vector<std::optional<HeatOperator>> operators(times.size());
  std::vector<std::string> operator_errors(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    try {
      operators[i].emplace(spectrum, times[i]);
    } catch (const Error& e) {
      operator_errors[i] = e.what();
    }
  }

  const std::size_t per_time = cfg.noise_levels.size() * static_cast<std::size_t>(cfg.repeats);
  const std::size_t total = times.size() * per_time;
  out.records.resize(total);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t index = 0; index < total; ++index) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t ti = index / per_time;
    const std::size_t ei = (index % per_time) / static_cast<std::size_t>(cfg.repeats);
    TrialRecord& rec = out.records[index];
    rec.index = index;
    rec.t = times[ti];
    rec.t_fraction = out.t_max > 0.0 ? rec.t / out.t_max : 0.0;
    rec.eps = cfg.noise_levels[ei];
    rec.repeat = static_cast<int>(index % static_cast<std::size_t>(cfg.repeats));
    rec.constants = constants;
    rec.profile = profile;
    rec.status = "error";
    try {
      if (!operators[ti]) throw Error(ErrorCode::kInvalidArgument, operator_errors[ti]);
      const HeatOperator& h_op = *operators[ti];
      rec.feasibility = check_certificate_condition(constants, profile, rec.t);

      std::optional<Certificate> cert;
      if (cfg.build_certificate) {
        try {
          cert = construct(h_op, out.support, signs);
          rec.verdict = verify(*cert, signs);
        } catch (const Error& e) {
          rec.error = e.what();
        }
      }

      std::seed_seq seq{cfg.noise_seed, static_cast<std::uint64_t>(index)};
      Rng rng(seq);
      const Eigen::VectorXd w = draw_noise(graph->size(), rec.eps, cfg.noise_model, rng);
      const Observation obs{apply(h_op, out.g_true) + w, rec.t, rec.eps};
      const RecoveryResult result = solve(h_op, obs, cfg.solver);
      rec.status = std::string(to_string(result.status));
      rec.iterations = result.iterations;
      rec.converged = result.converged;
      rec.residual = result.residual;

      try {
        rec.delta = delta_from_inverse(invert_restricted(restrict(h_op, out.support)));
      } catch (const Error& e) {
        rec.error = e.what();
      }
      const ErrorBudget budget =
          error_budget(profile.j, rec.delta.value_or(std::numeric_limits<double>::infinity()), rec.eps);
      if (rec.delta) rec.bound_l1 = budget.bound_l1;
      const RecoveryAudit audit =
          audit_recovery(out.g_true, result, budget, cert ? &*cert : nullptr);
      rec.err_l1 = audit.err_l1;
      rec.err_l2 = audit.err_l2;
      rec.off_support_l1 = audit.off_support_l1;
      rec.bound_held = rec.delta.has_value() && audit.bound_held;
      rec.split_ok = rec.delta.has_value() && audit.split_ok;
      rec.off_support_ok = audit.off_support_ok;
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.error = e.what();
    }
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

}  // namespace heatdecon
