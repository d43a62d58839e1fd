#include "fermieq.h"

#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "feq/bounds.hpp"
#include "feq/errors.hpp"
#include "feq/lattice.hpp"
#include "feq/observables.hpp"
#include "feq/run.hpp"
#include "feq/spectral.hpp"
#include "feq/states.hpp"
#include "feq/timeavg.hpp"

struct feq_config {
    feq::LatticeConfig cfg;
};

struct feq_state {
    feq::LatticeConfig cfg;  // owned copy; members below point into it
    bool is_fock = false;
    std::optional<feq::FockState> fock;               // t = 0 state
    std::optional<feq::SlaterState> slater;           // t = 0 state
    std::optional<feq::SlaterDynamics> dynamics;
};

namespace {

thread_local std::string g_last_error = "";

feq_status to_status(const std::exception& e) {
    g_last_error = e.what();
    if (dynamic_cast<const feq::CapacityError*>(&e)) return FEQ_ERR_CAPACITY;
    if (dynamic_cast<const feq::BoundViolation*>(&e)) return FEQ_ERR_BOUND;
    if (dynamic_cast<const feq::ConfigError*>(&e)) return FEQ_ERR_CONFIG;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return FEQ_ERR_CONFIG;
    return FEQ_ERR_INTERNAL;
}

template <class F>
feq_status guarded(F&& f) {
    try {
        f();
        return FEQ_OK;
    } catch (const std::exception& e) {
        return to_status(e);
    } catch (...) {
        g_last_error = "unknown error";
        return FEQ_ERR_INTERNAL;
    }
}

feq_status check_center(const feq::LatticeConfig& cfg, long center_id) {
    if (center_id < 0 || center_id >= static_cast<long>(cfg.centers.size())) {
        g_last_error = "center_id out of range";
        return FEQ_ERR_CONFIG;
    }
    return FEQ_OK;
}

}  // namespace

extern "C" {

const char* feq_last_error(void) { return g_last_error.c_str(); }

feq_status feq_config_create(int d, long L, long l, double rho_bar, double epsilon,
                             feq_config** out) {
    if (!out) {
        g_last_error = "out is NULL";
        return FEQ_ERR_CONFIG;
    }
    return guarded([&] {
        auto h = std::make_unique<feq_config>();
        h->cfg = feq::derive_config(d, L, l, rho_bar, epsilon);
        *out = h.release();
    });
}

void feq_config_destroy(feq_config* cfg) { delete cfg; }

long feq_config_sites(const feq_config* cfg) { return cfg ? cfg->cfg.V : 0; }
long feq_config_particles(const feq_config* cfg) { return cfg ? cfg->cfg.N : 0; }
long feq_config_boxes_per_side(const feq_config* cfg) { return cfg ? cfg->cfg.n : 0; }
long feq_config_num_centers(const feq_config* cfg) {
    return cfg ? static_cast<long>(cfg->cfg.centers.size()) : 0;
}

feq_status feq_center_coords(const feq_config* cfg, long center_id, long* coords_out) {
    if (!cfg || !coords_out) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    if (feq_status s = check_center(cfg->cfg, center_id); s != FEQ_OK) return s;
    const feq::Coord& c = cfg->cfg.centers[center_id];
    for (int mu = 0; mu < cfg->cfg.d; ++mu) coords_out[mu] = c[mu];
    return FEQ_OK;
}

feq_status feq_state_create(const feq_config* cfg, const char* engine, const char* state_spec,
                            uint64_t seed, feq_state** out) {
    if (!cfg || !engine || !state_spec || !out) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    return guarded([&] {
        auto h = std::make_unique<feq_state>();
        h->cfg = cfg->cfg;
        std::string eng = engine;
        if (eng == "fock") {
            h->is_fock = true;
            h->fock = feq::make_fock_state(h->cfg, state_spec, seed);
            h->fock->cfg = &h->cfg;
        } else if (eng == "slater") {
            h->slater = feq::make_slater_state(h->cfg, state_spec, seed);
            h->slater->cfg = &h->cfg;
            h->dynamics.emplace(*h->slater);
        } else {
            throw feq::ConfigError("unknown engine: " + eng);
        }
        *out = h.release();
    });
}

void feq_state_destroy(feq_state* state) { delete state; }

feq_status feq_density(const feq_state* state, long center_id, double t, double* out) {
    if (!state || !out) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    if (feq_status s = check_center(state->cfg, center_id); s != FEQ_OK) return s;
    return guarded([&] {
        const feq::Coord& c = state->cfg.centers[center_id];
        if (state->is_fock)
            *out = feq::density_expectation(feq::evolve_fock(*state->fock, t), c);
        else
            *out = state->dynamics->density(c, t);
    });
}

feq_status feq_delta_rho_sq(const feq_state* state, long center_id, double t, double* out) {
    if (!state || !out) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    if (feq_status s = check_center(state->cfg, center_id); s != FEQ_OK) return s;
    return guarded([&] {
        const feq::Coord& c = state->cfg.centers[center_id];
        if (state->is_fock)
            *out = feq::delta_rho_sq_expectation(feq::evolve_fock(*state->fock, t), c);
        else
            *out = state->dynamics->delta_rho_sq(c, t);
    });
}

feq_status feq_neq_measure(const feq_state* state, double t, double* out, int* is_surrogate) {
    if (!state || !out) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    return guarded([&] {
        if (state->is_fock) {
            *out = feq::p_neq_expectation(feq::evolve_fock(*state->fock, t));
            if (is_surrogate) *is_surrogate = 0;
        } else {
            *out = state->dynamics->neq_surrogate(t);
            if (is_surrogate) *is_surrogate = 1;
        }
    });
}

feq_status feq_time_average_variance(const feq_state* state, long center_id, double tau,
                                     long m_cut, double* value, double* truncation_bound) {
    if (!state || !value) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    if (feq_status s = check_center(state->cfg, center_id); s != FEQ_OK) return s;
    return guarded([&] {
        const feq::Coord& c = state->cfg.centers[center_id];
        feq::SpectralAverageResult r = state->is_fock
                                           ? feq::time_average_spectral(*state->fock, c, tau, m_cut)
                                           : feq::time_average_spectral(*state->slater, c, tau, m_cut);
        *value = r.value;
        if (truncation_bound) *truncation_bound = r.truncation_bound;
    });
}

feq_status feq_noneq_fraction(const feq_state* state, double tau, double delta, double dt,
                              double* out) {
    if (!state || !out) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    return guarded([&] {
        feq::TimeFractionReport r = state->is_fock
                                        ? feq::noneq_fraction(*state->fock, tau, delta, dt)
                                        : feq::noneq_fraction(*state->dynamics, tau, delta, dt);
        *out = r.fraction;
    });
}

feq_status feq_jm_exact(const feq_config* cfg, const long* m, double tau, double* out) {
    if (!cfg || !m || !out) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    return guarded([&] {
        feq::Coord mc(m, m + cfg->cfg.d);
        *out = feq::jm_exact(mc, tau, cfg->cfg).value;
    });
}

feq_status feq_jm_log_bound(long m, double tau, long L, double* out) {
    if (!out) {
        g_last_error = "out is NULL";
        return FEQ_ERR_CONFIG;
    }
    return guarded([&] { *out = feq::jm_log_bound(m, tau, L); });
}

feq_status feq_chain(const feq_config* cfg, double tau, long m_cut, double* S,
                     double* delta_half, double* ratio) {
    if (!cfg || !S) {
        g_last_error = "NULL argument";
        return FEQ_ERR_CONFIG;
    }
    return guarded([&] {
        feq::ChainEvaluation ev = feq::chain_evaluate(cfg->cfg, tau, m_cut);
        *S = ev.S;
        if (delta_half) *delta_half = ev.delta_half;
        if (ratio) *ratio = ev.ratio;
    });
}

double feq_tent(double omega, double tau) { return feq::tent(omega, tau); }

feq_status feq_delta_threshold(double a, double tau, long L, int d, double* out) {
    if (!out) {
        g_last_error = "out is NULL";
        return FEQ_ERR_CONFIG;
    }
    return guarded([&] { *out = feq::delta_a(a, tau, static_cast<double>(L), d); });
}

int feq_run_file(const char* mode, const char* config_path, const char* out_dir,
                 const char* overrides) {
    feq::RunSpec spec;
    try {
        if (config_path && *config_path) spec = feq::parse_config_file(config_path);
        if (mode && *mode) spec.mode = mode;
        if (out_dir && *out_dir) spec.out_dir = out_dir;
        if (overrides && *overrides) {
            std::stringstream ss(overrides);
            std::string item;
            while (std::getline(ss, item, ';')) {
                if (item.empty()) continue;
                auto eq = item.find('=');
                if (eq == std::string::npos)
                    throw feq::ConfigError("override needs key=value: " + item);
                feq::apply_config_line(spec, item.substr(0, eq), item.substr(eq + 1));
            }
        }
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return 2;
    }
    return feq::run(spec);
}

}  // extern "C"
