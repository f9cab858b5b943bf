#pragma once

#include "heatdecon/bounds.hpp"
#include "heatdecon/certificate.hpp"
#include "heatdecon/graph.hpp"
#include "heatdecon/harness.hpp"
#include "heatdecon/recovery.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace heatdecon::io {

// Text graph format:
//
//   graph <N>
//   <u> <v> <b>          one line per edge
//   metric               optional
//   <d_00> ... <d_0N-1>  N rows of N distances
//
// Blank lines and lines starting with '#' are ignored. Errors carry the line
// number.
struct GraphFile {
  WeightedGraph graph;
  std::optional<Eigen::MatrixXd> metric;

  // The supplied metric (validated) when present, otherwise the constructed one.
  CompatibleMetric resolve_metric() const;
};

GraphFile parse_graph(std::istream& in);
GraphFile read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const WeightedGraph& g,
                 const Eigen::MatrixXd* metric = nullptr);

// Whitespace-separated reals.
Eigen::VectorXd read_vector_file(const std::string& path);

// Shortest representation that round-trips; "inf"/"-inf"/"nan" for
// non-finite values.
std::string format_double(double x);

nlohmann::json to_json(const FeasibilityReport& r);
std::string feasibility_csv_header();
std::string feasibility_csv_row(const FeasibilityReport& r);

nlohmann::json to_json(const CertificateVerdict& v);
nlohmann::json to_json(const Certificate& c, const CertificateVerdict& v);
// "vertex,value" rows of h.
void write_certificate_csv(std::ostream& out, const Certificate& c);

nlohmann::json to_json(const RecoveryResult& r);
nlohmann::json to_json(const RecoveryAudit& a);
nlohmann::json to_json(const ErrorBudget& b);
nlohmann::json to_json(const GraphConstants& c);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

// Column order is fixed; wall time is left out so reruns compare bytewise.
std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& r);
void write_trials_csv(std::ostream& out, const ExperimentResult& result);
nlohmann::json to_json(const TrialRecord& r);
nlohmann::json to_json(const ExperimentResult& result);

}  // namespace heatdecon::io
