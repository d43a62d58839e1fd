#ifndef FEQ_RUN_HPP
#define FEQ_RUN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "feq/bounds.hpp"
#include "feq/errors.hpp"
#include "feq/lattice.hpp"

namespace feq {

// Everything a run needs, merged from the config file and CLI flags.
struct RunSpec {
    std::string mode = "simulate";  // simulate | spectral | verify | sweep

    int d = 1;
    long L = 0;
    long l = 0;
    double rho_bar = 0.0;
    double epsilon = 0.25;
    double tau = 0.0;

    std::string engine = "slater";  // slater | fock
    std::string initial_state = "concentrated";
    std::uint64_t seed = 1;

    double dt = 0.0;   // 0 = pick tau/1000
    long m_cut = 0;    // 0 = default cutoff
    int threads = 1;
    std::string out_dir = ".";

    // sweep-mode grid
    std::string sweep = "";                 // jm | fraction | scaling
    std::vector<long> L_list;
    std::vector<double> tau_over_L_list;
    std::vector<long> m_list;
    std::vector<long> n_list;
};

// key = value file; '#' starts a comment; unknown keys are hard errors.
RunSpec parse_config_file(const std::string& path);
void apply_config_line(RunSpec& spec, const std::string& key, const std::string& value);

// Builds the configured initial state. Fock specifiers accept every Slater
// specifier plus "random_fock(seed)".
SlaterState make_slater_state(const LatticeConfig& cfg, const std::string& spec, std::uint64_t seed);
FockState make_fock_state(const LatticeConfig& cfg, const std::string& spec, std::uint64_t seed);

// Executes the run, writing CSV/JSON into spec.out_dir.
// Returns 0 on success, 2 on config errors, 3 on capacity, 4 when an
// in-hypothesis proved bound is violated.
int run(const RunSpec& spec);

// verify-mode worker, exposed for tests: the default grid of bound reports.
std::vector<BoundReport> default_verify_reports();
void write_reports_json(const std::vector<BoundReport>& reports, const std::string& path);

}  // namespace feq

#endif
