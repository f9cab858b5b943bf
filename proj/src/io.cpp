#include "heatdecon/io.hpp"

#include "heatdecon/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

namespace heatdecon::io {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void fail(ErrorCode code, std::size_t line, const std::string& what) {
  throw Error(code, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(ErrorCode::kParseError, line, std::string("expected ") + what + ", got '" + std::string(token) + "'");
  return value;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

const char* flag(bool b) { return b ? "true" : "false"; }

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string optional_cell(const std::optional<bool>& v) {
  return v ? std::string(flag(*v)) : std::string();
}

}  // namespace

CompatibleMetric GraphFile::resolve_metric() const {
  return metric ? CompatibleMetric::from_matrix(graph, *metric) : compatible_metric(graph);
}

GraphFile parse_graph(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  Vertex n = -1;
  std::vector<Edge> edges;
  std::set<std::pair<Vertex, Vertex>> seen;
  std::optional<Eigen::MatrixXd> metric;
  Vertex metric_rows = 0;
  bool in_metric = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto tokens = split(raw);
    if (tokens.empty() || tokens.front().front() == '#') continue;

    if (n < 0) {
      if (tokens.size() != 2 || tokens[0] != "graph")
        fail(ErrorCode::kParseError, line_no, "expected header 'graph <N>'");
      n = parse_number<Vertex>(tokens[1], line_no, "vertex count");
      if (n < 1) fail(ErrorCode::kInvalidVertexCount, line_no, "vertex count must be positive");
      continue;
    }
    if (!in_metric && tokens.size() == 1 && tokens[0] == "metric") {
      in_metric = true;
      metric = Eigen::MatrixXd(n, n);
      continue;
    }
    if (in_metric) {
      if (metric_rows >= n) fail(ErrorCode::kParseError, line_no, "more than N metric rows");
      if (static_cast<Vertex>(tokens.size()) != n)
        fail(ErrorCode::kParseError, line_no,
             "metric row has " + std::to_string(tokens.size()) + " entries, expected " + std::to_string(n));
      for (Vertex c = 0; c < n; ++c)
        (*metric)(metric_rows, c) = parse_number<double>(tokens[static_cast<std::size_t>(c)], line_no, "distance");
      ++metric_rows;
      continue;
    }

    if (tokens.size() != 3) fail(ErrorCode::kParseError, line_no, "expected '<u> <v> <b>'");
    Edge e{parse_number<Vertex>(tokens[0], line_no, "vertex index"),
           parse_number<Vertex>(tokens[1], line_no, "vertex index"),
           parse_number<double>(tokens[2], line_no, "weight")};
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      fail(ErrorCode::kIndexOutOfRange, line_no, "vertex index outside [0, " + std::to_string(n) + ")");
    if (e.u == e.v) fail(ErrorCode::kSelfLoop, line_no, "self loop at vertex " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      fail(ErrorCode::kNonPositiveWeight, line_no, "weight must be positive and finite");
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second)
      fail(ErrorCode::kDuplicateEdge, line_no, "edge listed twice");
    edges.push_back(e);
  }
  if (n < 0) fail(ErrorCode::kParseError, line_no, "missing 'graph <N>' header");
  if (in_metric && metric_rows != n)
    fail(ErrorCode::kParseError, line_no,
         "metric has " + std::to_string(metric_rows) + " rows, expected " + std::to_string(n));
  return GraphFile{build_graph(n, std::move(edges)), std::move(metric)};
}

GraphFile read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  return parse_graph(in);
}

void write_graph(std::ostream& out, const WeightedGraph& g, const Eigen::MatrixXd* metric) {
  out << "graph " << g.size() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << format_double(e.weight) << '\n';
  if (metric != nullptr) {
    out << "metric\n";
    for (Eigen::Index r = 0; r < metric->rows(); ++r) {
      for (Eigen::Index c = 0; c < metric->cols(); ++c)
        out << (c ? " " : "") << format_double((*metric)(r, c));
      out << '\n';
    }
  }
}

Eigen::VectorXd read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  std::vector<double> values;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    for (auto token : split(raw)) {
      if (token.front() == '#') break;
      values.push_back(parse_number<double>(token, line_no, "real"));
    }
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

nlohmann::json to_json(const FeasibilityReport& r) {
  return {{"t", r.t},
          {"cond1_lhs", r.cond1_lhs},
          {"cond1_rhs", r.cond1_rhs},
          {"cond2_lhs", r.cond2_lhs},
          {"cond2_rhs", r.cond2_rhs},
          {"cond1_ok", r.cond1_ok},
          {"cond2_ok", r.cond2_ok},
          {"inverse_norm_bound", optional_json(r.inverse_norm_bound)}};
}

std::string feasibility_csv_header() {
  return "t,cond1_lhs,cond1_rhs,cond2_lhs,cond2_rhs,cond1_ok,cond2_ok,inverse_norm_bound";
}

namespace {

// Every feasibility column after t.
std::string condition_cells(const FeasibilityReport& r) {
  std::ostringstream os;
  os << format_double(r.cond1_lhs) << ',' << format_double(r.cond1_rhs) << ','
     << format_double(r.cond2_lhs) << ',' << format_double(r.cond2_rhs) << ',' << flag(r.cond1_ok)
     << ',' << flag(r.cond2_ok) << ',' << optional_cell(r.inverse_norm_bound);
  return os.str();
}

}  // namespace

std::string feasibility_csv_row(const FeasibilityReport& r) {
  return format_double(r.t) + ',' + condition_cells(r);
}

nlohmann::json to_json(const CertificateVerdict& v) {
  return {{"unit_sup", v.unit_sup},
          {"interpolates", v.interpolates},
          {"strictly_interior", v.strictly_interior},
          {"interpolation_error", v.interpolation_error},
          {"margin", v.margin},
          {"worst_violation", v.worst_violation}};
}

nlohmann::json to_json(const Certificate& c, const CertificateVerdict& v) {
  return {{"support", c.support},
          {"signs", c.signs.values()},
          {"t", c.t},
          {"coeffs", std::vector<double>(c.coeffs.begin(), c.coeffs.end())},
          {"sup_norm", c.sup_norm},
          {"off_support_max", c.off_support_max},
          {"verdict", to_json(v)}};
}

void write_certificate_csv(std::ostream& out, const Certificate& c) {
  out << "vertex,value\n";
  for (Eigen::Index x = 0; x < c.values.size(); ++x) out << x << ',' << format_double(c.values[x]) << '\n';
}

nlohmann::json to_json(const RecoveryResult& r) {
  return {{"g_hat", std::vector<double>(r.g_hat.begin(), r.g_hat.end())},
          {"l1_norm", r.l1_norm},
          {"residual", r.residual},
          {"duality_gap", r.duality_gap},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"status", std::string(to_string(r.status))}};
}

nlohmann::json to_json(const RecoveryAudit& a) {
  nlohmann::json j{{"err_l1", a.err_l1},
                   {"err_l2", a.err_l2},
                   {"off_support_l1", a.off_support_l1},
                   {"split_rhs", a.split_rhs},
                   {"split_ok", a.split_ok},
                   {"l2_le_l1", a.l2_le_l1},
                   {"bound_held", a.bound_held}};
  j["eta_dot_h"] = optional_json(a.eta_dot_h);
  j["descent_ok"] = a.descent_ok ? nlohmann::json(*a.descent_ok) : nlohmann::json(nullptr);
  j["off_support_ok"] = a.off_support_ok ? nlohmann::json(*a.off_support_ok) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const ErrorBudget& b) {
  return {{"j", b.j}, {"delta", b.delta}, {"eps", b.eps}, {"bound_l1", b.bound_l1}};
}

nlohmann::json to_json(const GraphConstants& c) {
  return {{"n", c.n}, {"op_norm", c.op_norm}, {"gap", c.gap}, {"zeta", c.zeta}};
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

std::string trial_csv_header() {
  return "index,t,t_fraction,eps,repeat,n,op_norm,gap,zeta,j,d_min,"
         "cond1_lhs,cond1_rhs,cond2_lhs,cond2_rhs,cond1_ok,cond2_ok,inverse_norm_bound,"
         "cert_unit_sup,cert_interpolates,cert_strictly_interior,cert_margin,"
         "status,iterations,converged,residual,err_l1,err_l2,off_support_l1,"
         "delta,bound_l1,bound_held,split_ok,off_support_ok";
}

std::string trial_csv_row(const TrialRecord& r) {
  std::ostringstream os;
  const auto& v = r.verdict;
  os << r.index << ',' << format_double(r.t) << ',' << format_double(r.t_fraction) << ','
     << format_double(r.eps) << ',' << r.repeat << ',' << r.constants.n << ','
     << format_double(r.constants.op_norm) << ',' << format_double(r.constants.gap) << ','
     << format_double(r.constants.zeta) << ',' << r.profile.j << ',' << format_double(r.profile.d_min)
     << ',' << condition_cells(r.feasibility)
     << ',' << (v ? flag(v->unit_sup) : "") << ',' << (v ? flag(v->interpolates) : "") << ','
     << (v ? flag(v->strictly_interior) : "") << ',' << (v ? format_double(v->margin) : "") << ','
     << r.status << ',' << r.iterations << ',' << flag(r.converged) << ',' << format_double(r.residual)
     << ',' << format_double(r.err_l1) << ',' << format_double(r.err_l2) << ','
     << format_double(r.off_support_l1) << ',' << optional_cell(r.delta) << ','
     << optional_cell(r.bound_l1) << ',' << flag(r.bound_held) << ',' << flag(r.split_ok) << ','
     << optional_cell(r.off_support_ok);
  return os.str();
}

void write_trials_csv(std::ostream& out, const ExperimentResult& result) {
  out << trial_csv_header() << '\n';
  for (const auto& r : result.records) out << trial_csv_row(r) << '\n';
}

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json j{{"index", r.index},
                   {"t", r.t},
                   {"t_fraction", r.t_fraction},
                   {"eps", r.eps},
                   {"repeat", r.repeat},
                   {"constants", to_json(r.constants)},
                   {"j", r.profile.j},
                   {"d_min", finite_or_null(r.profile.d_min)},
                   {"feasibility", to_json(r.feasibility)},
                   {"status", r.status},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"residual", r.residual},
                   {"err_l1", r.err_l1},
                   {"err_l2", r.err_l2},
                   {"off_support_l1", r.off_support_l1},
                   {"delta", optional_json(r.delta)},
                   {"bound_l1", optional_json(r.bound_l1)},
                   {"bound_held", r.bound_held},
                   {"split_ok", r.split_ok},
                   {"wall_time_ms", r.wall_time_ms}};
  j["verdict"] = r.verdict ? to_json(*r.verdict) : nlohmann::json(nullptr);
  j["off_support_ok"] = r.off_support_ok ? nlohmann::json(*r.off_support_ok) : nlohmann::json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

nlohmann::json to_json(const ExperimentResult& result) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& r : result.records) trials.push_back(to_json(r));
  return {{"n_vertices", result.n_vertices},
          {"support", result.support},
          {"g_true", std::vector<double>(result.g_true.begin(), result.g_true.end())},
          {"t_max", result.t_max},
          {"trials", trials}};
}

}  // namespace heatdecon::io
