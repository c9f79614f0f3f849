#pragma once

#include "pathdep/experiments.hpp"
#include "pathdep/solver.hpp"

#include <span>
#include <string>

namespace pathdep {

// 17 significant digits: doubles survive a text round trip.
std::string format_g17(double v);

// ConvergenceTable contract: one row per (partition, epsilon), columns
// n,mesh,epsilon,p_exceed,ci,pseudometric,grid_rate_stat,bias_footnote.
// Columns an experiment does not produce are written as nan.
std::string table_csv(const ConvergenceTable& table);

// Remainder diagnostics: n,mesh,term,m2,ci.
std::string remainder_csv(const ConvergenceTable& table);

// Paths: t,v1,...,vk.
std::string path_csv(const GridPath& x);

// Solver iterations: iteration,distance.
std::string solve_report_csv(const SolveReport& report);

struct ReportRow {
    std::string quantity;
    double estimate = 0.0;
    double ci = 0.0;
    double bound = 0.0;
    bool pass = false;
};

// Check reports: quantity,estimate,ci,bound,pass.
std::string report_csv(std::span<const ReportRow> rows);

}  // namespace pathdep
