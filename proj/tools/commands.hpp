#pragma once

#include "polyls/convergence.hpp"
#include "polyls/optimizer.hpp"
#include "polyls/vtk.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>

namespace polyls::cli {

/// Exit codes of the command line tool.
enum ExitCode { kExitOk = 0, kExitError = 1, kExitDegenerate = 2 };

/// RFC 4180 CSV (CRLF line ends) with header
/// iteration,n,t,J,grad_norm_sq,m,zls_distance,dt,components_inside,components_outside,elements,grad_phi_median
void write_history_csv(std::span<const IterationRecord> history, std::ostream& out);
/// Header i,N,err_l,rate_l,err_q,rate_q; the first rate cells are empty.
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);

/// Fitted mesh with point data phi (the fitted vertex values) and, when given, grad_J,
/// plus cell data sign.
VtkGrid level_set_grid(const FittedMesh& fitted, const ContinuousVectorField* gradient = nullptr);
/// Fine triangles of an agglomerated mesh with cell data partition (element id) and sign.
VtkGrid partition_grid(const PolytopicMesh& mesh);
/// State submesh with one copy of each vertex per triangle, so the discontinuous u
/// is shown as is; cell data element.
VtkGrid state_grid(const BernoulliState& state);

/// Recovers and fits a level-set field the way the optimizer does.
FittedMesh fit_level_set(const DgField& phi);

/// The three subcommands. Progress goes to `log`; results go to files below the
/// resolved output directory, or to `out` for the table.
int run_optimize(const std::filesystem::path& config, std::ostream& log);
int run_convergence_table(const std::filesystem::path& config, std::ostream& out);
int run_export_mesh(const std::filesystem::path& config, std::ostream& log);

}  // namespace polyls::cli
