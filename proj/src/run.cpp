#include "feq/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "feq/observables.hpp"
#include "feq/spectral.hpp"
#include "feq/states.hpp"
#include "feq/timeavg.hpp"

namespace feq {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    }
}

template <class T, class F>
std::vector<T> to_list(const std::string& key, const std::string& v, F parse_one) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_one(key, item));
    }
    return out;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::string path = dir + "/" + name;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file: " + path);
    return f;
}

// Runs fn(i) for i in [0, count) on the requested number of workers and
// returns the produced rows in index order.
std::vector<std::string> parallel_rows(long count, int threads,
                                       const std::function<std::string(long)>& fn) {
    std::vector<std::string> rows(static_cast<std::size_t>(count));
    threads = std::max(1, std::min<int>(threads, static_cast<int>(count > 0 ? count : 1)));
    if (threads == 1) {
        for (long i = 0; i < count; ++i) rows[i] = fn(i);
        return rows;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (long i = w; i < count; i += threads) rows[i] = fn(i);
        });
    }
    for (auto& t : pool) t.join();
    return rows;
}

struct StateSpec {
    std::string kind;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

StateSpec parse_state_spec(const std::string& s) {
    StateSpec out;
    auto open = s.find('(');
    if (open == std::string::npos) {
        out.kind = trim(s);
        return out;
    }
    if (s.back() != ')') throw ConfigError("malformed initial_state: " + s);
    out.kind = trim(s.substr(0, open));
    std::string arg = trim(s.substr(open + 1, s.size() - open - 2));
    out.seed = static_cast<std::uint64_t>(to_long("initial_state", arg));
    out.has_seed = true;
    return out;
}

LatticeConfig cfg_from(const RunSpec& spec) {
    if (spec.L <= 0) throw ConfigError("L is required");
    long l = spec.l > 0 ? spec.l : spec.L;
    double rho = spec.rho_bar > 0.0 ? spec.rho_bar : 0.5;
    try {
        return derive_config(spec.d, spec.L, l, rho, spec.epsilon);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

double require_tau(const RunSpec& spec) {
    if (spec.tau <= 0.0) throw ConfigError("tau must be positive");
    return spec.tau;
}

}  // namespace

void apply_config_line(RunSpec& spec, const std::string& key, const std::string& value) {
    if (key == "mode") spec.mode = value;
    else if (key == "d") spec.d = static_cast<int>(to_long(key, value));
    else if (key == "L") spec.L = to_long(key, value);
    else if (key == "l") spec.l = to_long(key, value);
    else if (key == "rho_bar") spec.rho_bar = to_double(key, value);
    else if (key == "epsilon") spec.epsilon = to_double(key, value);
    else if (key == "tau") spec.tau = to_double(key, value);
    else if (key == "engine") spec.engine = value;
    else if (key == "initial_state") spec.initial_state = value;
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(to_long(key, value));
    else if (key == "dt") spec.dt = to_double(key, value);
    else if (key == "m_cut") spec.m_cut = to_long(key, value);
    else if (key == "threads") spec.threads = static_cast<int>(to_long(key, value));
    else if (key == "out_dir") spec.out_dir = value;
    else if (key == "sweep") spec.sweep = value;
    else if (key == "L_list") spec.L_list = to_list<long>(key, value, to_long);
    else if (key == "tau_over_L_list") spec.tau_over_L_list = to_list<double>(key, value, to_double);
    else if (key == "m_list") spec.m_list = to_list<long>(key, value, to_long);
    else if (key == "n_list") spec.n_list = to_list<long>(key, value, to_long);
    else throw ConfigError("unknown config key: '" + key + "'");
}

RunSpec parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file: " + path);
    RunSpec spec;
    std::string line;
    long lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_config_line(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return spec;
}

SlaterState make_slater_state(const LatticeConfig& cfg, const std::string& spec, std::uint64_t seed) {
    StateSpec st = parse_state_spec(spec);
    if (st.kind == "concentrated") return concentrated_state(cfg);
    if (st.kind == "uniform_product") return uniform_product_state(cfg);
    if (st.kind == "momentum_filled") return momentum_filled_state(cfg);
    if (st.kind == "random_slater") return random_slater_state(cfg, st.has_seed ? st.seed : seed);
    throw ConfigError("unknown initial_state for the Slater engine: " + spec);
}

FockState make_fock_state(const LatticeConfig& cfg, const std::string& spec, std::uint64_t seed) {
    StateSpec st = parse_state_spec(spec);
    if (st.kind == "random_fock") return random_fock_state(cfg, st.has_seed ? st.seed : seed);
    if (st.kind == "concentrated") return fock_from_sites(cfg, concentrated_sites(cfg));
    return fock_from_slater(make_slater_state(cfg, spec, seed));
}

void write_reports_json(const std::vector<BoundReport>& reports, const std::string& path) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const BoundReport& r : reports) {
        nlohmann::ordered_json j;
        j["name"] = r.name;
        j["parameters"] = r.params;
        j["lhs"] = r.lhs;
        j["rhs"] = r.rhs;
        j["margin"] = r.margin();
        j["hypothesis_ok"] = r.hypothesis_ok;
        arr.push_back(std::move(j));
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f << arr.dump(2) << "\n";
}

namespace {

int run_simulate(const RunSpec& spec) {
    LatticeConfig cfg = cfg_from(spec);
    const double tau = require_tau(spec);
    const double dt = spec.dt > 0.0 ? spec.dt : tau / 1000.0;
    const long steps = static_cast<long>(std::floor(tau / dt + 1e-9));

    std::ofstream ts = open_out(spec.out_dir, "timeseries.csv");
    ts << "t,center_id,rho,delta_rho_sq\n";

    if (spec.engine == "slater") {
        SlaterDynamics dyn(make_slater_state(cfg, spec.initial_state, spec.seed));
        for (long k = 0; k <= steps; ++k) {
            double t = static_cast<double>(k) * dt;
            for (std::size_t ci = 0; ci < cfg.centers.size(); ++ci) {
                ts << fmt(t) << ',' << ci << ',' << fmt(dyn.density(cfg.centers[ci], t)) << ','
                   << fmt(dyn.delta_rho_sq(cfg.centers[ci], t)) << "\n";
            }
        }
    } else if (spec.engine == "fock") {
        FockState psi0 = make_fock_state(cfg, spec.initial_state, spec.seed);
        for (long k = 0; k <= steps; ++k) {
            double t = static_cast<double>(k) * dt;
            FockState psi = evolve_fock(psi0, t);
            for (std::size_t ci = 0; ci < cfg.centers.size(); ++ci) {
                ts << fmt(t) << ',' << ci << ',' << fmt(density_expectation(psi, cfg.centers[ci]))
                   << ',' << fmt(delta_rho_sq_expectation(psi, cfg.centers[ci])) << "\n";
            }
        }
    } else {
        throw ConfigError("unknown engine: " + spec.engine);
    }

    // nonequilibrium time fraction needs the threshold delta_1/2, defined
    // only for tau > L
    if (tau > static_cast<double>(cfg.L)) {
        double delta = delta_a(0.5, tau, static_cast<double>(cfg.L), cfg.d);
        double fr_dt = std::min(dt, tau / 1000.0);  // fraction sampling needs a fine grid
        TimeFractionReport fr;
        if (spec.engine == "fock") {
            fr = noneq_fraction(make_fock_state(cfg, spec.initial_state, spec.seed), tau, delta, fr_dt);
        } else {
            SlaterDynamics dyn(make_slater_state(cfg, spec.initial_state, spec.seed));
            fr = noneq_fraction(dyn, tau, delta, fr_dt);
        }
        std::ofstream ff = open_out(spec.out_dir, "fraction.csv");
        ff << "tau,delta,dt,fraction,surrogate_flag\n";
        ff << fmt(fr.tau) << ',' << fmt(fr.delta) << ',' << fmt(fr.dt) << ',' << fmt(fr.fraction)
           << ',' << (fr.surrogate ? 1 : 0) << "\n";
    }
    return 0;
}

std::string spectral_row(const LatticeConfig& cfg, double tau, long m_flat) {
    std::ostringstream os;
    try {
        double j, rhs;
        bool hyp = asymptotic_regime(cfg.L, tau);
        if (cfg.d == 1) {
            j = jm_exact_1d(m_flat, tau, cfg.L).value;
            rhs = jm_log_bound(m_flat, tau, cfg.L);
        } else {
            Coord m = cfg.unflat(m_flat);
            j = jm_exact(m, tau, cfg).value;
            rhs = jm_reduction_bound(m, tau, cfg);
        }
        os << cfg.d << ',' << cfg.L << ',' << fmt(tau) << ',' << m_flat << ',' << fmt(j) << ','
           << fmt(rhs) << ',' << fmt(rhs - j) << ',' << (hyp ? 1 : 0);
    } catch (const std::exception&) {
        os << cfg.d << ',' << cfg.L << ',' << fmt(tau) << ',' << m_flat << ",nan,nan,nan,0";
    }
    return os.str();
}

int run_spectral(const RunSpec& spec) {
    LatticeConfig cfg = cfg_from(spec);
    const double tau = require_tau(spec);
    std::vector<long> ms = spec.m_list;
    if (ms.empty()) ms = {1, 2, 5};

    std::ofstream out = open_out(spec.out_dir, "spectral.csv");
    out << "d,L,tau,m,J_exact,jm_log_bound,margin,hypothesis_ok\n";
    auto rows = parallel_rows(static_cast<long>(ms.size()), spec.threads,
                              [&](long i) { return spectral_row(cfg, tau, ms[i]); });
    for (const auto& r : rows) out << r << "\n";
    return 0;
}

int run_sweep(const RunSpec& spec) {
    std::ofstream out = open_out(spec.out_dir, "sweep.csv");
    if (spec.sweep == "jm") {
        out << "d,L,tau,m,J_exact,jm_log_bound,margin,hypothesis_ok\n";
        LatticeConfig cfg = cfg_from(spec);
        struct Pt { double tau; long m; };
        std::vector<Pt> grid;
        for (double r : spec.tau_over_L_list)
            for (long m : spec.m_list) grid.push_back({r * static_cast<double>(spec.L), m});
        auto rows = parallel_rows(static_cast<long>(grid.size()), spec.threads,
                                  [&](long i) { return spectral_row(cfg, grid[i].tau, grid[i].m); });
        for (const auto& r : rows) out << r << "\n";
        return 0;
    }
    if (spec.sweep == "fraction") {
        out << "tau,delta,dt,fraction,surrogate_flag\n";
        if (spec.tau_over_L_list.empty()) return 0;
        LatticeConfig cfg = cfg_from(spec);
        auto rows = parallel_rows(
            static_cast<long>(spec.tau_over_L_list.size()), spec.threads, [&](long i) -> std::string {
                double tau = spec.tau_over_L_list[i] * static_cast<double>(cfg.L);
                double dt = spec.dt > 0.0 ? spec.dt : tau / 1000.0;
                std::ostringstream os;
                try {
                    double delta = delta_a(0.5, tau, static_cast<double>(cfg.L), cfg.d);
                    TimeFractionReport fr;
                    if (spec.engine == "fock") {
                        fr = noneq_fraction(make_fock_state(cfg, spec.initial_state, spec.seed), tau,
                                            delta, dt);
                    } else {
                        SlaterDynamics dyn(make_slater_state(cfg, spec.initial_state, spec.seed));
                        fr = noneq_fraction(dyn, tau, delta, dt);
                    }
                    os << fmt(fr.tau) << ',' << fmt(fr.delta) << ',' << fmt(fr.dt) << ','
                       << fmt(fr.fraction) << ',' << (fr.surrogate ? 1 : 0);
                } catch (const std::exception&) {
                    os << fmt(tau) << ",nan," << fmt(dt) << ",nan,0";
                }
                return os.str();
            });
        for (const auto& r : rows) out << r << "\n";
        return 0;
    }
    if (spec.sweep == "scaling") {
        out << "d,L,n,tau,S,delta_half,ratio\n";
        struct Pt { long L; long n; double r; };
        std::vector<Pt> grid;
        for (long L : spec.L_list)
            for (long n : spec.n_list)
                for (double r : spec.tau_over_L_list) grid.push_back({L, n, r});
        auto rows = parallel_rows(
            static_cast<long>(grid.size()), spec.threads, [&](long i) -> std::string {
                const Pt& p = grid[i];
                std::ostringstream os;
                try {
                    long l = box_side_for(p.L, p.n);
                    LatticeConfig cfg = derive_config(spec.d, p.L, l,
                                                      spec.rho_bar > 0.0 ? spec.rho_bar : 0.5,
                                                      spec.epsilon);
                    ChainEvaluation ev = chain_evaluate(cfg, p.r * static_cast<double>(p.L), spec.m_cut);
                    os << spec.d << ',' << p.L << ',' << p.n << ',' << fmt(p.r * p.L) << ','
                       << fmt(ev.S) << ',' << fmt(ev.delta_half) << ',' << fmt(ev.ratio);
                } catch (const std::exception&) {
                    os << spec.d << ',' << p.L << ',' << p.n << ",nan,nan,nan,nan";
                }
                return os.str();
            });
        for (const auto& r : rows) out << r << "\n";
        return 0;
    }
    throw ConfigError("unknown sweep kind: '" + spec.sweep + "'");
}

void append_window_count_reports(std::vector<BoundReport>& out) {
    const long L = 101;
    for (long m : {1L, 2L}) {
        auto sines = sorted_sines_1d(m, L);
        for (double delta : {1.0 / 25.0, 1e-3}) {
            double worst = -1e300, wl = 0, wr = 0, wx = 0;
            for (long i = 0; i < 400; ++i) {
                double x = -1.1 + 2.2 * static_cast<double>(i) / 399.0;
                double lhs = static_cast<double>(omega_brute_1d(sines, x, delta));
                double rhs = window_count_bound(x, delta, L);
                if (lhs - rhs > worst) { worst = lhs - rhs; wl = lhs; wr = rhs; wx = x; }
            }
            BoundReport r;
            r.name = "window_count_vs_density_bound";
            r.lhs = wl;
            r.rhs = wr;
            r.params["L"] = static_cast<double>(L);
            r.params["m"] = static_cast<double>(m);
            r.params["delta"] = delta;
            r.params["x"] = wx;
            out.push_back(std::move(r));
        }
    }
}

}  // namespace

std::vector<BoundReport> default_verify_reports() {
    std::vector<BoundReport> out;

    // small exact-engine configuration, both engines
    LatticeConfig small = derive_config(1, 9, 3, 1.0 / 3.0, 0.5);
    {
        FockState psi = fock_from_sites(small, concentrated_sites(small));
        out.push_back(variance_average_check(psi, small.centers[0], 30.0));
        out.push_back(fraction_bound_report(psi, 30.0, 30.0 / 1000.0));
    }
    {
        SlaterState s = concentrated_state(small);
        out.push_back(variance_average_check(s, small.centers[0], 30.0));
    }
    {
        LatticeConfig mid = derive_config(1, 21, 7, 1.0 / 3.0, 0.5);
        out.push_back(fraction_bound_report(concentrated_state(mid), 63.0, 63.0 / 1000.0));
    }

    append_window_count_reports(out);

    // level-count integrals against the log bound, inside the hypothesis
    {
        const long L = 10001;
        const double tau = 2.5 * static_cast<double>(L);
        for (long m : {1L, 100L}) {
            BoundReport r;
            r.name = "jm_exact_vs_log_bound";
            r.lhs = jm_exact_1d(m, tau, L).value;
            r.rhs = jm_log_bound(m, tau, L);
            r.hypothesis_ok = asymptotic_regime(L, tau);
            r.params["L"] = static_cast<double>(L);
            r.params["tau"] = tau;
            r.params["m"] = static_cast<double>(m);
            out.push_back(std::move(r));
        }
    }

    // dimensional reduction of J_m, d = 2
    {
        LatticeConfig c2 = derive_config(2, 15, 5, 0.5, 0.25);
        const double tau = 2.5 * 15.0;
        for (Coord m : {Coord{1, 2}, Coord{3, 3}, Coord{2, 0}}) {
            BoundReport r;
            r.name = "jm_exact_vs_reduction_bound";
            r.lhs = jm_exact(m, tau, c2).value;
            r.rhs = jm_reduction_bound(m, tau, c2);
            r.params["L"] = 15.0;
            r.params["tau"] = tau;
            r.params["m0"] = static_cast<double>(m[0]);
            r.params["m1"] = static_cast<double>(m[1]);
            out.push_back(std::move(r));
        }
    }

    // companion threshold inequality: delta_1/2^2 <= 2 delta_1
    for (double r_ : {2.5, 5.0, 10.0}) {
        const double L = 10001.0;
        BoundReport r;
        r.name = "delta_half_sq_vs_2_delta_one";
        r.lhs = std::pow(delta_a(0.5, r_ * L, L, 1), 2.0);
        r.rhs = 2.0 * delta_a(1.0, r_ * L, L, 1);
        r.params["L"] = L;
        r.params["tau"] = r_ * L;
        out.push_back(std::move(r));
    }

    {
        LatticeConfig big = derive_config(1, 10001, 3335, 0.5, 0.25);
        for (BoundReport& r : window_estimate_reports(big, 2.5 * 10001.0)) out.push_back(std::move(r));
    }

    return out;
}

namespace {

int run_verify(const RunSpec& spec) {
    std::vector<BoundReport> reports = default_verify_reports();
    std::filesystem::create_directories(spec.out_dir);
    write_reports_json(reports, spec.out_dir + "/report.json");
    for (const BoundReport& r : reports)
        if (r.hypothesis_ok && !r.holds()) return 4;
    return 0;
}

}  // namespace

int run(const RunSpec& spec) {
    try {
        if (spec.mode == "simulate") return run_simulate(spec);
        if (spec.mode == "spectral") return run_spectral(spec);
        if (spec.mode == "verify") return run_verify(spec);
        if (spec.mode == "sweep") return run_sweep(spec);
        throw ConfigError("unknown mode: '" + spec.mode + "'");
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 3;
    } catch (const BoundViolation& e) {
        std::fprintf(stderr, "bound violation: %s\n", e.what());
        return 4;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    return 0;
}

}  // namespace feq
