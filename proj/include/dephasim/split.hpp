#pragma once

#include <functional>
#include <optional>

#include "dephasim/exact.hpp"

namespace dephasim {

/// Bipartition of the subsystem list into observed ("system") and traced
/// ("bath") positions. 0-based internally; JSON ingestion is 1-based.
struct SplitSpec {
  std::vector<int> system;  // ordered, disjoint
  std::vector<int> bath;    // ordered complement

  int n_system() const { return static_cast<int>(system.size()); }
  int n_bath() const { return static_cast<int>(bath.size()); }
};

SplitSpec validate_split(const SplitSpec& sp, const ModelSpec& m);

std::vector<int> system_dims(const ModelSpec& m, const SplitSpec& sp);
std::vector<int> bath_dims(const ModelSpec& m, const SplitSpec& sp);

/// Merge system and bath sub-multi-indices back into a full MultiIndex.
MultiIndex merge_split_index(const ModelSpec& m, const SplitSpec& sp,
                             const std::vector<int>& sys_positions,
                             const std::vector<int>& bath_positions);

/// Diagonal bath populations. Exactly one storage form is set.
struct EnvPopulations {
  std::optional<std::vector<double>> full;  // length = prod bath dims, flat bath order
  std::optional<std::vector<std::vector<double>>> product;  // per bath subsystem

  bool is_product() const { return product.has_value(); }
};

EnvPopulations validate_env(const EnvPopulations& env, const ModelSpec& m,
                            const SplitSpec& sp);

/// Probability of one joint bath configuration.
double env_weight(const EnvPopulations& env, const std::vector<int>& bath_positions,
                  const std::vector<int>& bdims);

struct SplitPhi {
  Complex system_part;  // i dOmega_S + Upsilon_S
  Complex bath_part;    // i dOmega_B + Upsilon_B
  Complex cross_part;   // i dOmega_SB + chi
};

/// Decompose Phi over a bipartition. system_part + bath_part + cross_part
/// recombines to the full Phi for the merged indices.
SplitPhi split_phi(const ModelSpec& m, const SplitSpec& sp,
                   const std::vector<int>& sTilde, const std::vector<int>& s,
                   const std::vector<int>& bTilde, const std::vector<int>& b);

/// Bath-diagonal rate: Phi_{s~b,sb} = Phi^(S)_{s~,s}
///   + sum_{i in S, j in B} [ i (h_ij + h_ji)/2 - (Gamma_ij - Gamma_ji)/2 ]
///     (s~_i - s_i) b_j.
Complex partial_diagonal_phi(const ModelSpec& m, const SplitSpec& sp,
                             const std::vector<int>& sTilde,
                             const std::vector<int>& s,
                             const std::vector<int>& b);

/// Per-bath-subsystem coefficient c_j(s~,s) of b_j in the exponent above.
std::vector<Complex> cross_coefficients(const ModelSpec& m, const SplitSpec& sp,
                                        const std::vector<int>& sTilde,
                                        const std::vector<int>& s);

/// System-block rate i dOmega_S + Upsilon_S for a system index pair.
Complex system_block_phi(const ModelSpec& m, const SplitSpec& sp,
                         const std::vector<int>& sTilde, const std::vector<int>& s);

/// f_{s~s}(t) = sum_b q_b exp(-t Phi_{s~b,sb}). Product-form populations are
/// evaluated as a product of per-subsystem sums (exponent is linear in each
/// b_j); full-form populations as the direct sum.
Complex coherence_factor(const ModelSpec& m, const SplitSpec& sp,
                         const EnvPopulations& env, const std::vector<int>& sTilde,
                         const std::vector<int>& s, double t);

/// Exact d/dt of the coherence factor (mixture derivative, no differencing).
Complex coherence_factor_derivative(const ModelSpec& m, const SplitSpec& sp,
                                    const EnvPopulations& env,
                                    const std::vector<int>& sTilde,
                                    const std::vector<int>& s, double t);

/// Reduced system state: element (s~,s) of rho0_s times f_{s~s}(t).
Matrix system_state(const ModelSpec& m, const SplitSpec& sp, const Matrix& rho0_s,
                    const EnvPopulations& env, double t);

/// Reduced environment state for diagonal system populations p_s:
/// element (b~,b) of rho0_e times F_{b~b}(t) = sum_s p_s exp(-t Phi_{sb~,sb}).
Matrix environment_state(const ModelSpec& m, const SplitSpec& sp,
                         const std::vector<double>& sys_populations,
                         const Matrix& rho0_e, double t);

struct MemoryWitnessPair {
  int system_index;  // 0-based subsystem positions
  int bath_index;
  Complex coupling;  // i (h_ij + h_ji)/2 - (Gamma_ij - Gamma_ji)/2
};

/// True iff some cross symmetric-h entry or some cross antisymmetric-Gamma
/// entry exceeds 1e-14; returns the witnessing pairs.
bool memory_necessary_condition(const ModelSpec& m, const SplitSpec& sp,
                                std::vector<MemoryWitnessPair>* witnesses = nullptr,
                                double threshold = 1e-14);

}  // namespace dephasim
