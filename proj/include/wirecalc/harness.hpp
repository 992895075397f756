#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wirecalc/continuous.hpp"
#include "wirecalc/discrete.hpp"
#include "wirecalc/linear.hpp"
#include "wirecalc/setmat.hpp"

namespace wirecalc {

/// Seeded generators for random boxes, systems, and wiring diagrams, plus
/// the compositionality law checks they feed. Everything is deterministic
/// given the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::size_t below(std::size_t n) { return n == 0 ? 0 : gen_() % n; }
    std::size_t range(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
    bool chance(double p) { return real(0.0, 1.0) < p; }
    double real(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    std::mt19937_64& gen() { return gen_; }

private:
    std::mt19937_64 gen_;
};

PortType random_finite_type(Rng& rng, std::size_t max_symbols = 3);
Box random_finite_box(Rng& rng, std::size_t max_in = 2, std::size_t max_out = 2);
Box random_euclid_box(Rng& rng, std::size_t max_in = 2, std::size_t max_out = 2,
                      std::size_t max_dim = 1);

DiscreteSystem random_discrete_system(Rng& rng, const Box& box, std::size_t max_states = 4);
WeightedDiscreteSystem random_weighted_system(Rng& rng, const Box& box,
                                              std::size_t max_states = 4);
LinearSystem random_linear_system(Rng& rng, const Box& box, std::size_t max_state_dim = 2);
ContinuousSystem random_affine_system(Rng& rng, const Box& box, std::size_t max_state_dim = 2);

/// A random expression over the given variables: nested field operations,
/// integer powers, and the transcendental functions.
Expr random_expr(Rng& rng, const std::vector<std::string>& vars, int depth = 3,
                 bool transcendental = true);

/// A random wiring diagram out of the given inner box. Every outer input
/// feeds at least one inner input; inner inputs may also be fed back from
/// type-compatible inner outputs.
WiringDiagram random_wiring(Rng& rng, const Box& inner, std::size_t max_extra_outputs = 2);

struct CheckReport {
    std::string law;
    std::size_t trials = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

CheckReport check_ds_functoriality(std::uint64_t seed, std::size_t trials);
CheckReport check_ds_stst_compositionality(std::uint64_t seed, std::size_t trials);
CheckReport check_ms_stst_compositionality(std::uint64_t seed, std::size_t trials);
CheckReport check_set_stst_compositionality(std::uint64_t seed, std::size_t trials);
CheckReport check_mat_functoriality(std::uint64_t seed, std::size_t trials);
CheckReport check_smat_functoriality(std::uint64_t seed, std::size_t trials);
CheckReport check_ls_functoriality(std::uint64_t seed, std::size_t trials);
CheckReport check_cs_functoriality(std::uint64_t seed, std::size_t trials);
CheckReport check_euler_compositionality(std::uint64_t seed, std::size_t trials);
CheckReport check_qmat_functoriality(std::uint64_t seed, std::size_t trials);
CheckReport check_linearization_compositionality(std::uint64_t seed, std::size_t trials);

std::vector<CheckReport> check_all_laws(std::uint64_t seed, std::size_t trials);

}  // namespace wirecalc
