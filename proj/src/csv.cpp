#include "pathdep/csv.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace pathdep {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string table_csv(const ConvergenceTable& table) {
    std::ostringstream os;
    os << "n,mesh,epsilon,p_exceed,ci,pseudometric,grid_rate_stat,bias_footnote\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const ConvergenceRow& row : table.rows) {
        const std::size_t cols = table.epsilons.empty() || row.exceedance.empty()
                                     ? 1
                                     : table.epsilons.size();
        for (std::size_t e = 0; e < cols; ++e) {
            const bool has_eps = e < row.exceedance.size();
            os << row.cells << ',' << format_g17(row.mesh) << ','
               << format_g17(has_eps ? table.epsilons[e] : nan) << ','
               << format_g17(has_eps ? row.exceedance[e].mean : nan) << ','
               << format_g17(has_eps ? row.exceedance[e].ci_half_width : nan) << ','
               << format_g17(row.pseudometric.n_samples ? row.pseudometric.mean : nan)
               << ','
               << format_g17(row.grid_rate.n_samples ? row.grid_rate.mean : nan) << ','
               << format_g17(row.bias_footnote) << "\n";
        }
    }
    return os.str();
}

std::string remainder_csv(const ConvergenceTable& table) {
    std::ostringstream os;
    os << "n,mesh,term,m2,ci\n";
    for (const ConvergenceRow& row : table.rows) {
        for (std::size_t term = 0; term < row.remainder_m2.size(); ++term) {
            os << row.cells << ',' << format_g17(row.mesh) << ',' << term << ','
               << format_g17(row.remainder_m2[term].mean) << ','
               << format_g17(row.remainder_m2[term].ci_half_width) << "\n";
        }
    }
    return os.str();
}

std::string path_csv(const GridPath& x) {
    std::ostringstream os;
    os << "t";
    for (std::size_t c = 0; c < x.dim(); ++c) os << ",v" << (c + 1);
    os << "\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        os << format_g17(x.grid().point(i));
        for (std::size_t c = 0; c < x.dim(); ++c) os << ',' << format_g17(x.at(i, c));
        os << "\n";
    }
    return os.str();
}

std::string solve_report_csv(const SolveReport& report) {
    std::ostringstream os;
    os << "iteration,distance\n";
    for (std::size_t i = 0; i < report.successive_distances.size(); ++i)
        os << (i + 1) << ',' << format_g17(report.successive_distances[i]) << "\n";
    return os.str();
}

std::string report_csv(std::span<const ReportRow> rows) {
    std::ostringstream os;
    os << "quantity,estimate,ci,bound,pass\n";
    for (const ReportRow& row : rows) {
        os << row.quantity << ',' << format_g17(row.estimate) << ','
           << format_g17(row.ci) << ',' << format_g17(row.bound) << ','
           << (row.pass ? "true" : "false") << "\n";
    }
    return os.str();
}

}  // namespace pathdep
