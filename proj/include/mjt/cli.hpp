#ifndef MJT_CLI_HPP
#define MJT_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mjt {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 check failed, 2 config error, 3 numerical failure.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_config = 2, exit_numerical = 3 };

// Parsed and validated run configuration; a single JSON document with
// CLI-flag overrides. Unknown keys are rejected.
struct RunConfig {
    // model
    bool garnier = true;
    double sigma = 0.5;
    std::string custom_potential = "constant";
    double custom_value = 0.0;
    double custom_i1 = 1.0;
    int custom_dim = 2;

    // tolerances
    double ode_tol = 1e-10;
    double threshold = 1e-5;

    // grids
    int samples = 401;
    double span0 = 0.0, span1 = 5.0;
    double s_margin = 0.02;
    int depth = 3;
    int truncation = 7;
    int variations = 10;

    // output
    std::string format = "csv";  // csv | json
    std::string out_path = "-";  // "-" -> stdout
    std::uint64_t seed = 12345;

    // subcommand specifics
    std::string preset = "axis_separatrix";  // simulate: axis_separatrix | ellipse_separatrix | custom
    std::vector<double> p0, v0;
    std::string closed_form;  // edge_q2zero | edge_ellipse
    bool has_orbit = false;
    double orbit_a = 0.3;
    std::string extremal = "axis";  // hessian-check: axis | ellipse | orbit

    std::string config_hash() const;
};

RunConfig load_config(const std::string& json_text);

int cmd_simulate(const RunConfig& cfg);
int cmd_geodesic(const RunConfig& cfg);
int cmd_hessian_check(const RunConfig& cfg);
int cmd_jacobi_field(const RunConfig& cfg);
int cmd_conjugate_points(const RunConfig& cfg);
int cmd_morse(const RunConfig& cfg);

// Full argv dispatch used by the mjt binary; catches toolkit errors and maps
// them to exit codes with machine-readable JSON on stderr.
int run_cli(int argc, char** argv);

}  // namespace mjt

#endif
