#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fracbif/bifurcation.hpp"
#include "fracbif/config.hpp"
#include "fracbif/solvers.hpp"

namespace fracbif {

/// Header line shared by every CSV: "# fracbif <version> config=<hash> seed=<seed>".
std::string csv_banner(const RunConfig& cfg);

/// Columns lambda, sup_u, sup_v, energy_u, energy_v, hopf_u, hopf_v, margin, iterations_u,
/// iterations_v, converged; values with 17 significant digits.
void write_branch_csv(const BifurcationDiagram& diag, const RunConfig& cfg, std::ostream& out);

/// Columns x, u, v, u/d^s, v/d^s (v columns empty when there is no saddle).
void write_solution_csv(const BranchPoint& pt, double s, const RunConfig& cfg, std::ostream& out);

/// Columns x, phi.
void write_eigen_csv(const EigenResult& eig, const RunConfig& cfg, std::ostream& out);

nlohmann::ordered_json to_json(const SolveReport& rep, bool with_solution);
nlohmann::ordered_json to_json(const BranchPoint& pt);
nlohmann::ordered_json to_json(const LambdaStarEstimate& est);

/// Parameters, mesh, seed, config hash and version; commands add their results.
nlohmann::ordered_json run_record(const RunConfig& cfg, const std::string& command);

/// sup-norms of both branches against λ, with the λ* bracket shaded.
void write_branch_svg(const BifurcationDiagram& diag, std::ostream& out);

}  // namespace fracbif
