// Command-line front end: graph generation, feasibility checks, certificates,
// single recoveries and batch experiments.
//
// Exit codes: 0 success, 1 configuration or input error, 2 when some trial
// (or the single solve) did not reach an optimal status.

#include "heatdecon/bounds.hpp"
#include "heatdecon/certificate.hpp"
#include "heatdecon/error.hpp"
#include "heatdecon/harness.hpp"
#include "heatdecon/heat.hpp"
#include "heatdecon/io.hpp"
#include "heatdecon/recovery.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace heatdecon;

constexpr int kExitConfig = 1;
constexpr int kExitTrialFailures = 2;

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof())
      throw Error(ErrorCode::kConfigInvalid, std::string("bad ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// Everything derived from a graph file that most subcommands need.
struct Problem {
  std::optional<WeightedGraph> graph;
  std::optional<CompatibleMetric> metric;
  std::shared_ptr<const SpectralData> spectrum;
  GraphConstants constants;
  std::vector<Vertex> support;
  SupportProfile profile;
};

struct ProblemArgs {
  std::string graph_file;
  std::string support;
  Vertex j = 0;
  std::uint64_t seed = 0;

  void attach(CLI::App* app, bool needs_support = true) {
    app->add_option("--graph", graph_file, "graph file")->required();
    if (!needs_support) return;
    app->add_option("--support", support, "comma-separated support vertices");
    app->add_option("--j", j, "support size for greedy placement");
    app->add_option("--seed", seed, "seed for placement and synthesis");
  }

  Problem load(bool needs_support = true) const {
    Problem p;
    auto file = io::read_graph_file(graph_file);
    p.metric = file.resolve_metric();
    p.graph = std::move(file.graph);
    p.spectrum = std::make_shared<const SpectralData>(decompose(laplacian(*p.graph)));
    p.constants = graph_constants(*p.spectrum, *p.metric);
    if (!needs_support) return p;
    if (support.empty() == (j == 0))
      throw Error(ErrorCode::kConfigInvalid, "give exactly one of --support or --j");
    p.support = support.empty() ? place_support(*p.metric, j, seed)
                                : parse_list<Vertex>(support, "support");
    p.profile = support_profile(*p.metric, p.support);
    return p;
  }
};

struct TimeArgs {
  std::optional<double> t;
  std::optional<double> fraction;

  void attach(CLI::App* app) {
    auto* abs = app->add_option("--t", t, "diffusion time");
    auto* frac = app->add_option("--t-fraction", fraction, "time as a fraction of T*");
    abs->excludes(frac);
  }

  double resolve(const Problem& p) const {
    if (t) return *t;
    if (fraction) return *fraction * max_admissible_time(p.constants, p.profile);
    throw Error(ErrorCode::kConfigInvalid, "give --t or --t-fraction");
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfigInvalid, "cannot write '" + path + "'");
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse spike recovery from heat-smoothed observations on weighted graphs"};
  app.require_subcommand(1);

  // gen-graph
  GraphSpec spec;
  std::vector<double> weight_range;
  bool with_metric = false;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-graph", "emit a generated graph file");
  gen->add_option("--generator", spec.generator, "path | cycle | grid | complete | erdos_renyi")
      ->required();
  gen->add_option("--n", spec.n, "vertex count");
  gen->add_option("--rows", spec.rows, "grid rows");
  gen->add_option("--cols", spec.cols, "grid columns");
  gen->add_option("--p", spec.p, "edge probability");
  gen->add_option("--seed", spec.seed, "random seed");
  gen->add_option("--weight", spec.weight, "constant edge weight");
  gen->add_option("--weight-range", weight_range, "uniform random weights in [lo, hi]")
      ->expected(2);
  gen->add_flag("--with-metric", with_metric, "append the constructed compatible metric");
  gen->add_option("-o,--output", gen_out, "output path (default stdout)");

  // check
  ProblemArgs check_args;
  double check_t = 0.0;
  std::string check_format = "json";
  auto* check = app.add_subcommand("check", "evaluate the certificate-existence conditions at t");
  check_args.attach(check);
  check->add_option("--t", check_t, "diffusion time")->required();
  check->add_option("--format", check_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  // max-time
  ProblemArgs max_args;
  auto* max_time = app.add_subcommand("max-time", "largest T at which both conditions hold");
  max_args.attach(max_time);

  // certificate
  ProblemArgs cert_args;
  TimeArgs cert_time;
  std::string cert_signs;
  double cert_tol = kDefaultCertificateTol;
  std::string cert_dump;
  auto* certificate = app.add_subcommand("certificate", "build and verify a dual certificate");
  cert_args.attach(certificate);
  cert_time.attach(certificate);
  certificate->add_option("--signs", cert_signs, "comma-separated +1/-1 (default all +1)");
  certificate->add_option("--tol", cert_tol, "verification tolerance");
  certificate->add_option("--dump-h", cert_dump, "write h as vertex,value CSV");

  // recover
  ProblemArgs rec_args;
  TimeArgs rec_time;
  std::string rec_f_file;
  std::string rec_coeffs;
  double rec_eps = 0.0;
  std::string rec_noise = "sphere";
  SolverOptions rec_opts;
  auto* recover = app.add_subcommand("recover", "solve one l1 recovery problem");
  rec_args.attach(recover);
  rec_time.attach(recover);
  recover->add_option("--f", rec_f_file, "observation file (otherwise synthesized)");
  recover->add_option("--coeffs", rec_coeffs, "coefficients on the support for synthesis");
  recover->add_option("--eps", rec_eps, "noise level / constraint radius");
  recover->add_option("--noise", rec_noise, "sphere | gaussian")
      ->check(CLI::IsMember({"sphere", "gaussian"}));
  recover->add_option("--gap-tol", rec_opts.gap_tol, "duality gap tolerance");
  recover->add_option("--max-iter", rec_opts.max_iter, "iteration cap");

  // experiment
  std::string config_path;
  std::string exp_csv;
  std::string exp_json;
  auto* experiment = app.add_subcommand("experiment", "run a configured batch of trials");
  experiment->add_option("--config", config_path, "JSON config file")->required();
  experiment->add_option("--csv", exp_csv, "CSV output (overrides config)");
  experiment->add_option("--json", exp_json, "JSON output (overrides config)");

  // kernel
  ProblemArgs kernel_args;
  double kernel_t = 0.0;
  std::string kernel_out;
  auto* kernel = app.add_subcommand("kernel", "export K(t) as CSV");
  kernel_args.attach(kernel, false);
  kernel->add_option("--t", kernel_t, "diffusion time")->required();
  kernel->add_option("-o,--output", kernel_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!weight_range.empty()) spec.weight_range = std::make_pair(weight_range[0], weight_range[1]);
      const WeightedGraph g = generate_graph(spec);
      std::ostringstream os;
      if (with_metric) {
        const auto m = compatible_metric(g);
        io::write_graph(os, g, &m.dist());
      } else {
        io::write_graph(os, g);
      }
      emit(gen_out, os.str());
      return 0;
    }

    if (*check) {
      const Problem p = check_args.load();
      const auto report = check_certificate_condition(p.constants, p.profile, check_t);
      if (check_format == "csv")
        std::cout << io::feasibility_csv_header() << '\n' << io::feasibility_csv_row(report) << '\n';
      else
        std::cout << io::to_json(report).dump(2) << '\n';
      return 0;
    }

    if (*max_time) {
      const Problem p = max_args.load();
      nlohmann::json out = io::to_json(p.constants);
      out["support"] = p.support;
      out["j"] = p.profile.j;
      out["d_min"] = std::isfinite(p.profile.d_min) ? nlohmann::json(p.profile.d_min) : nlohmann::json(nullptr);
      out["t_max"] = max_admissible_time(p.constants, p.profile);
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*certificate) {
      const Problem p = cert_args.load();
      const double t = cert_time.resolve(p);
      const SignPattern signs = cert_signs.empty()
                                    ? SignPattern(std::vector<int>(p.support.size(), 1))
                                    : SignPattern(parse_list<int>(cert_signs, "sign"));
      const HeatOperator h_op(p.spectrum, t);
      const Certificate cert = construct(h_op, p.support, signs);
      const CertificateVerdict verdict = verify(cert, signs, cert_tol);
      if (!cert_dump.empty()) {
        std::ostringstream os;
        io::write_certificate_csv(os, cert);
        emit(cert_dump, os.str());
      }
      nlohmann::json out = io::to_json(cert, verdict);
      out["feasibility"] = io::to_json(check_certificate_condition(p.constants, p.profile, t));
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*recover) {
      const Problem p = rec_args.load();
      const double t = rec_time.resolve(p);
      const HeatOperator h_op(p.spectrum, t);
      nlohmann::json out;
      Observation obs{Eigen::VectorXd(), t, rec_eps};
      std::optional<Eigen::VectorXd> g_true;
      if (!rec_f_file.empty()) {
        obs.f = io::read_vector_file(rec_f_file);
      } else {
        g_true = Eigen::VectorXd::Zero(p.graph->size());
        Rng rng(rec_args.seed);
        if (!rec_coeffs.empty()) {
          const auto c = parse_list<double>(rec_coeffs, "coefficient");
          if (c.size() != p.support.size())
            throw Error(ErrorCode::kConfigInvalid, "--coeffs needs one value per support vertex");
          for (std::size_t i = 0; i < c.size(); ++i) (*g_true)[p.support[i]] = c[i];
        } else {
          std::uniform_real_distribution<double> magnitude(0.5, 2.0);
          std::bernoulli_distribution coin(0.5);
          for (auto v : p.support) {
            const double m = magnitude(rng);
            (*g_true)[v] = coin(rng) ? m : -m;
          }
        }
        const auto model = rec_noise == "sphere" ? NoiseModel::kSphere : NoiseModel::kGaussian;
        obs.f = apply(h_op, *g_true) + draw_noise(p.graph->size(), rec_eps, model, rng);
        out["g_true"] = std::vector<double>(g_true->begin(), g_true->end());
      }
      const RecoveryResult result = solve(h_op, obs, rec_opts);
      out["t"] = t;
      out["eps"] = rec_eps;
      out["result"] = io::to_json(result);
      if (g_true) {
        const double delta = delta_from_inverse(invert_restricted(restrict(h_op, p.support)));
        const ErrorBudget budget = error_budget(p.profile.j, delta, rec_eps);
        const SignPattern signs = SignPattern::of(*g_true, p.support);
        std::optional<Certificate> cert;
        try {
          cert = construct(h_op, p.support, signs);
        } catch (const Error&) {
        }
        out["budget"] = io::to_json(budget);
        out["audit"] = io::to_json(audit_recovery(*g_true, result, budget, cert ? &*cert : nullptr));
      }
      std::cout << out.dump(2) << '\n';
      return result.status == SolveStatus::kOptimal ? 0 : kExitTrialFailures;
    }

    if (*experiment) {
      const std::string text = read_text(config_path);
      ExperimentConfig cfg = parse_config(text);
      if (!exp_csv.empty()) cfg.csv_path = exp_csv;
      if (!exp_json.empty()) cfg.json_path = exp_json;
      const ExperimentResult result = run_experiment(cfg);

      std::ostringstream csv;
      io::write_trials_csv(csv, result);
      if (!cfg.csv_path.empty() || cfg.json_path.empty()) emit(cfg.csv_path, csv.str());
      if (!cfg.json_path.empty()) {
        nlohmann::json out = io::to_json(result);
        out["config"] = nlohmann::json::parse(text);
        emit(cfg.json_path, out.dump(2) + "\n");
      }
      return result.any_failure() ? kExitTrialFailures : 0;
    }

    if (*kernel) {
      const Problem p = kernel_args.load(false);
      std::ostringstream os;
      io::write_matrix_csv(os, HeatOperator(p.spectrum, kernel_t).kernel());
      emit(kernel_out, os.str());
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
