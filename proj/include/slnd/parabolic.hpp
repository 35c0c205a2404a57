#pragma once

#include "slnd/group.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace slnd {

/// Standard parabolic subgroup of SL_N given by an ordered block composition
/// (n_1,...,n_r), realized as block upper triangular matrices. r = 1 encodes
/// the whole group, r = N the Borel.
class StandardParabolic {
public:
    explicit StandardParabolic(std::vector<int> blocks);
    static StandardParabolic borel(int n);
    static StandardParabolic whole_group(int n);

    int dim() const { return dim_; }
    int num_blocks() const { return int(blocks_.size()); }
    int num_simple_roots() const { return num_blocks() - 1; }
    const std::vector<int>& blocks() const { return blocks_; }
    int block_start(int b) const { return starts_[b]; }
    int block_of(int coord) const;

    bool operator==(const StandardParabolic& o) const = default;

private:
    std::vector<int> blocks_;
    std::vector<int> starts_;
    int dim_ = 0;
};

/// Subset I of the r-1 simple-root slots of a parabolic, identified with the
/// block boundaries (slot i sits between block i and block i+1, 0-based).
struct RootSubset {
    std::set<int> included;

    static RootSubset empty() { return {}; }
    static RootSubset full(const StandardParabolic& p) {
        RootSubset s;
        for (int i = 0; i < p.num_simple_roots(); ++i) s.included.insert(i);
        return s;
    }
};

/// Merges adjacent blocks across every boundary in I; the empty set returns
/// P itself and the full set returns the whole group.
StandardParabolic parabolic_from_subset(const StandardParabolic& p, const RootSubset& i);

/// For each merged block of parabolic_from_subset, the indices of the
/// original blocks it absorbs.
std::vector<std::vector<int>> merged_block_groups(const StandardParabolic& p, const RootSubset& i);

/// The decomposition g = u·a·m·k relative to a standard parabolic and
/// K = SO(N): u block-strictly-upper unipotent, a positive block scalars
/// t_i with prod t_i^{n_i} = 1, m block diagonal with det-one blocks,
/// k special orthogonal. m·k is the uniquely determined factor.
struct HorosphericalCoords {
    Eigen::MatrixXd u, a, m, k;
    std::vector<double> block_scalars;  // t_i per block

    Eigen::MatrixXd assemble() const { return u * a * m * k; }
};

HorosphericalCoords horospherical_decompose(const Eigen::MatrixXd& g, const StandardParabolic& p);

/// Values of the simple roots alpha_i(a) = t_i/t_{i+1} on the a-part.
/// Empty for P = G.
std::vector<double> simple_root_values(const StandardParabolic& p, const HorosphericalCoords& c);

/// A standard composition viewed through a coordinate relabeling;
/// perm[sorted_position] = original coordinate. Used for parabolics that are
/// permutation conjugates of standard ones (cocharacter parabolics, flags
/// moved by a rational element).
struct ParabolicFrame {
    StandardParabolic parabolic;
    std::vector<int> perm;

    static ParabolicFrame standard(StandardParabolic p);
    Eigen::MatrixXd perm_matrix() const;  // S with S(i, perm[i]) = 1
    bool identity_perm() const;
};

/// Decomposition with respect to a permuted standard parabolic: conjugate
/// into standard position, decompose, conjugate back.
HorosphericalCoords decompose_in_frame(const Eigen::MatrixXd& g, const ParabolicFrame& f);

struct RelativeCompatibilityReport {
    double u_dev, a_dev, mk_dev;
    double max_dev;
};

/// Verifies the compatibility identities between the coordinates relative to
/// P and to the coarser P_I: u_{P_I}(g) = u_{P,I}(g), a_{P_I}(g) = a_{P,I}(g)
/// and m_{P_I}k_{P_I} = u^I a^I m k. Returns the deviations.
RelativeCompatibilityReport relative_compatibility_check(const Eigen::MatrixXd& g,
                                                         const StandardParabolic& p,
                                                         const RootSubset& i);

/// Region omega_U x A_t x omega_M K in horospherical coordinates: every
/// simple root of the a-part exceeds t, u entries within bound_u (sup norm),
/// m within bound_m (operator norm).
struct SiegelSet {
    StandardParabolic parabolic;
    double t;
    double bound_u;
    double bound_m;
};

bool siegel_membership(const Eigen::MatrixXd& g, const SiegelSet& s);

struct SiegelReduction {
    IMat gamma;  // unimodular integral, gamma * g lies in the verified set
    HorosphericalCoords coords;
    SiegelSet verified_in;
    bool verified;
    bool exact_layer;  // true for N = 2 (Gauss reduction constants)
};

/// Reduces g into a Siegel set for the Borel: exact Gauss reduction for
/// N = 2 (sqrt(3)/2 constants), LLL row reduction for N >= 3 with
/// implementation-defined constants, always re-verified via
/// siegel_membership.
SiegelReduction reduce_to_siegel(const Eigen::MatrixXd& g);

enum class RootFate { divergent, bounded, unclassified };

struct BoundaryReport {
    std::vector<RootFate> fates;
    std::vector<double> final_roots;
    RootSubset bounded_roots;  // the set I
    enum class Outcome { interior, boundary, unclassified } outcome;
    std::optional<StandardParabolic> stratum;  // P_I for the boundary outcome
    Eigen::MatrixXd u_limit;                   // u_{P_I} of the final element
    Eigen::MatrixXd residual;                  // m·k of the final element w.r.t. P_I
};

/// Classifies each simple root of P along the trajectory as divergent
/// (final value above the threshold and monotone increasing over the last
/// half) or bounded (inside the band throughout); anything else is reported
/// as unclassified rather than silently dropped. Classification contract
/// only; no claim about the true limit.
BoundaryReport boundary_classify(const std::vector<Eigen::MatrixXd>& trajectory,
                                 const StandardParabolic& p,
                                 double divergence_threshold = 1e3,
                                 std::pair<double, double> bounded_band = {1e-2, 1e2});

struct BoundaryActionResult {
    HorosphericalCoords coords;  // with respect to q P q^{-1}
    ParabolicFrame frame;        // description of q P q^{-1}
    double assembly_dev;         // | u'a'm'k' - q·(uamk) | (sup norm)
};

/// Left action of a rational element on horospherical coordinates,
///   q·(u, a, mk) = (u_q · {}^{a_q m_q k_q}u, a_q · {}^{k_q}a, m_q · {}^{k_q}m · k_q k),
/// where (u_q, a_q, m_q k_q) are the coordinates of q with respect to
/// q P q^{-1}. Requires q to carry the standard flag to a coordinate flag.
BoundaryActionResult rational_boundary_action(const GroupElementQ& q,
                                              const HorosphericalCoords& coords,
                                              const StandardParabolic& p);

/// The parabolic attached to a one-parameter diagonal subgroup: weights are
/// stably sorted in decreasing order, the composition collects equal-weight
/// runs and the frame records the sorting permutation. Membership in the
/// returned parabolic is equivalent to a_t^{-1} g a_t staying bounded as
/// t -> infinity (the contracting direction used by the flag-cocharacter
/// constructions).
ParabolicFrame parabolic_from_cocharacter(const Cocharacter& a);

/// True iff x has zero entries everywhere below the block structure of the
/// frame (after relabeling by the frame permutation).
bool frame_membership(const Eigen::MatrixXd& x, const ParabolicFrame& f, double tol = 1e-9);

/// iota(g) = blockdiag(g, ..., g, I): `copies` diagonal copies of SL_m inside
/// SL_N padded by the identity. Carries SO(m) into SO(N).
struct BlockEmbedding {
    int m;
    int big_n;
    int copies = 1;

    void validate() const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& g) const;
    Cocharacter extend(const Cocharacter& a) const;
};

struct EmbeddingReport {
    double u_dev, a_dev, mk_dev;
    double max_dev;
};

/// Decomposes g w.r.t. (P_{a_t}, SO(m)) and iota(g) w.r.t. (Q_{a_t}, SO(N))
/// and compares iota(u) with u', iota(a) with a', iota(mk) with m'k'.
EmbeddingReport embedding_compatibility_check(const Eigen::MatrixXd& g, const BlockEmbedding& e,
                                              const Cocharacter& a);

/// LLL row reduction (float Gram, exact integer transform): returns reduced
/// rows B and unimodular T with B = T · input.
struct LLLResult {
    Eigen::MatrixXd basis;
    IMat transform;
};
LLLResult lll_reduce(const Eigen::MatrixXd& rows, double delta = 0.99);

}  // namespace slnd
