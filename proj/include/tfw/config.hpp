#ifndef TFW_CONFIG_HPP
#define TFW_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "tfw/grid.hpp"
#include "tfw/nuclei.hpp"
#include "tfw/solver.hpp"

namespace tfw {

/** Run configuration parsed from a plain key/value file. Lines are
 *  `key value...` (an optional `=` after the key is accepted), `#` starts
 *  a comment. `nucleus x y z [weight]` may repeat; `uniform_m` selects a
 *  homogeneous medium instead of nuclei. */
struct RunConfig {
    double L = 8.0;
    int N = 48;
    double R0 = 0.9;
    std::vector<Point> sites;
    std::vector<double> weights;
    double uniform_m = -1.0;  // >= 0: uniform density, nuclei ignored

    double a = 0.2;
    std::vector<double> a_list;
    double tol = 1e-10;
    int max_iter = 20000;
    bool dealias = false;

    int site = 0;
    Point displacement{0.3, 0.0, 0.0};
    double fd_step = -1.0;  // < 0: default 1e-3 L/N
    std::vector<double> halfwidths;
    double shell_width = 0.0;
    std::vector<double> r_list;
    double force_fit_max_a = 1e30;
    int force_site = 0;
    bool dump_fields = false;

    Grid grid() const { return Grid(L, N); }
    NuclearConfig nuclei() const;
    bool uniform() const { return uniform_m >= 0.0; }
    SolverOptions solver_options() const;
};

RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);

} // namespace tfw

#endif
