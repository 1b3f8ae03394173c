// Output serialization: trajectory CSV, report JSON, plot TSV.
#ifndef COAGBREAK_IO_HPP
#define COAGBREAK_IO_HPP

#include <string>

#include <json.hpp>

#include "coagbreak/diagnostics.hpp"
#include "coagbreak/integrator.hpp"
#include "coagbreak/kernels.hpp"
#include "coagbreak/studies.hpp"

namespace coagbreak {

// 17 significant digits: lossless for 64-bit floating values.
std::string format_real(Real v);

void write_text_file(const std::string& path, const std::string& content);

// Header "t,x,g", one row per checkpoint x cell.
std::string trajectory_csv(const Trajectory& traj, const Grid& grid);

nlohmann::json assumption_report_json(const AssumptionReport& report);
nlohmann::json study_report_json(const StudyReport& report);
nlohmann::json step_stats_json(const StepStats& stats);
nlohmann::json grid_summary_json(const Grid& grid);
nlohmann::json certificate_json(const BoundCertificate& cert);

std::string study_curve_tsv(const StudyReport& report);

} // namespace coagbreak

#endif
