#pragma once

#include "slnd/execmode.hpp"
#include "slnd/group.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace slnd {

/// Coordinate box in lie-algebra coordinates (the set O).
struct Window {
    std::vector<std::pair<double, double>> box;

    static Window symmetric(int dim, double c);
    int dim() const { return int(box.size()); }
    void validate() const;
    std::vector<double> point(const std::vector<double>& unit) const;  // map [0,1)^d into the box
};

struct ExplicitSource {
    std::vector<LatticeModule> modules;
};
struct TorusSource {
    std::vector<int64_t> weights;
};
struct AlgebraClosureSource {};
using StableSource = std::variant<ExplicitSource, TorusSource, AlgebraClosureSource>;

/// Description of the subgroup H: a Lie-algebra basis, the base point h_0,
/// the window O, and a source for the H-stable rational subspaces.
struct SubgroupSpec {
    int n = 0;
    std::vector<Eigen::MatrixXd> lie_basis;
    Eigen::MatrixXd h0;  // empty means identity
    Window window;
    StableSource stable_source = AlgebraClosureSource{};

    void validate() const;
    Eigen::MatrixXd base_point() const;
    /// h_0 · exp(sum x_i basis_i)
    Eigen::MatrixXd element_at(const std::vector<double>& x) const;
};

struct StableFamily {
    std::vector<LatticeModule> modules;          // primitive, proper, nonzero
    std::vector<LatticeModule> infinite_strata;  // repeated-weight classes of rank >= 2
    bool certified() const { return infinite_strata.empty(); }
};

/// Enumerates the nontrivial H-stable rational subspaces according to the
/// declared source. Explicit lists are validated for invariance (exact);
/// torus sources return the unions of weight classes and flag every class of
/// multiplicity >= 2 as an infinite stratum; algebra closure iterates
/// kernels/images of the generated matrix algebra and throws when the
/// invariant-subspace lattice is detected infinite.
StableFamily stable_subspaces(const SubgroupSpec& h);

/// l_P(g, W) = covolume of W·g; W must be primitive, proper and nonzero.
double l_p(const Eigen::MatrixXd& g, const LatticeModule& w);
double l_p(const QMat& g, const LatticeModule& w);

struct DeltaResult {
    double value = 0;
    bool certified = false;
    int argmin = -1;  // index into the certified module list, -1 if a stratum wins
};

/// min over the stable family of ‖W·g^{-1}‖; infinite strata contribute an
/// uncertified upper bound through lattice reduction of the translated
/// stratum.
DeltaResult delta(const Eigen::MatrixXd& g, const SubgroupSpec& h);
DeltaResult delta(const GroupElementQ& g, const SubgroupSpec& h);

struct GoodnessParams {
    double c = 1;
    double alpha = 1;
};

struct CgoodViolation {
    long ball;
    double eps, measure_est, bound, sup_est;
};

struct CgoodReport {
    long balls_tested = 0;
    long balls_skipped = 0;  // sup below 1e-12
    std::vector<CgoodViolation> violations;
    double worst_ratio = 0;  // max of measure/bound over all tested (ball, eps)
    bool passed() const { return violations.empty(); }
};

using ScalarField = std::function<double(const std::vector<double>&)>;

/// Empirical (C,alpha)-goodness check: for sampled balls B in the window and
/// a log grid of eps, compares the sampled sublevel fraction against
/// C (eps/sup_B)^alpha plus three-sigma statistical slack.
CgoodReport cgood_check(const ScalarField& f, const Window& window, const GoodnessParams& params,
                        long n_balls, int n_eps, uint64_t seed, ExecMode mode = ExecMode::parallel);

/// x -> sup-norm of Λ_W translated by g^{-1}·gamma·h0·exp(x)·gamma^{-1}
/// (row convention applies the product on the right).
ScalarField composite_field(const Eigen::MatrixXd& g, const Eigen::MatrixXd& gamma,
                            const LatticeModule& w, const SubgroupSpec& h);

/// delta_l = eps_prev · (1/(2nC))^(1/alpha): the sublevel threshold that
/// the (C,alpha) bound turns into measure >= 1 - 1/(2n).
Rat prop42_delta_l(const Rat& eps_prev, int n, const Rat& c, int inv_alpha);
double prop42_delta_l(double eps_prev, int n, const GoodnessParams& p);

/// base^(1/root) with exact comparison by cross-powering.
struct RootRat {
    Rat base;
    long root = 1;

    double value() const;
    static bool less(const RootRat& a, const RootRat& b);
    static bool equal(const RootRat& a, const RootRat& b);
};

/// eps_l = min_k (Z0^{-n^2} delta_l^k eta)^(1/(k+1)) for k = 0..k_max,
/// capped at min(eta, eps_prev).
RootRat prop42_epsilon(const Rat& eta, int n, const Int& z0, const Rat& delta_l, int k_max,
                       const Rat& eps_prev);
RootRat prop42_epsilon(const Rat& eta, int n, const Int& z0, const Rat& delta_l, int k_max);

struct XiChainResult {
    std::vector<int> chain;                    // indices into Xi
    std::vector<LatticeModule> lambdas;        // Λ_0 .. Λ_k
    std::vector<LatticeModule> lambda_primed;  // Λ'_1 .. Λ'_k
    LatticeModule sum_closure;                 // primitive closure of ΣΛ_i
    Int z0;
    Rat lhs_sq, rhs_sq;  // squared sides of the telescoping inequality at g
    bool inequality_holds;
};

/// Greedy ξ-chain: extend with ξ whose translate ξ·W meets the current sum
/// in dimension < rank W, until the sum is Ξ-stable. Verifies, in exact
/// arithmetic, Π‖W·ξ_i‖_g >= Z0^{-n^2}·Π‖Λ'_i‖_g·‖closure(ΣΛ_i)‖_g.
XiChainResult xi_chain(const LatticeModule& w, const std::vector<QMat>& xi, uint64_t seed,
                       const QMat& g);
XiChainResult xi_chain(const LatticeModule& w, const std::vector<QMat>& xi, uint64_t seed);

/// Brute-force sup of x -> ‖W·(h0 exp(x) g)‖ over a nested grid with
/// `grid_per_dim` subdivisions per window axis (monotone in the resolution
/// by grid nesting).
double sup_search_oracle(const Eigen::MatrixXd& g, const SubgroupSpec& h, const LatticeModule& w,
                         int grid_per_dim);

struct Prop42DimReport {
    int dim;
    double eps_cascade;
    double min_sup;
    long subspace_count;
    LatticeModule argmin;
};

struct Prop42Report {
    bool hypothesis_ok = false;
    double hypothesis_value = 0;
    double eta = 0;
    std::vector<Prop42DimReport> dims;
    bool pass = false;  // vacuously true when the hypothesis fails
};

/// Desk-scale verification of the inductive criterion: enumerates every
/// primitive W with HNF entries bounded by `height_bound` and checks that
/// the observed sup over the window clears the epsilon cascade whenever the
/// stable-subspace hypothesis holds at level eta.
Prop42Report prop42_verify(const Eigen::MatrixXd& g, const SubgroupSpec& h, double eta,
                           int height_bound, const GoodnessParams& params, const Int& z0 = Int(1),
                           int grid_per_dim = 1000, ExecMode mode = ExecMode::parallel);

/// All primitive modules of the given rank whose HNF basis entries are
/// bounded by `height` in absolute value.
std::vector<LatticeModule> enumerate_primitive_modules(int n, int rank, int height);

struct Lambda1 {
    double value = 0;        // length of the shortest vector found
    double lower_bound = 0;  // certified lower bound (min Gram-Schmidt norm)
    bool certified = false;  // exact enumeration (rank <= 4)
};

/// Shortest nonzero vector of the lattice spanned by the rows.
Lambda1 shortest_vector(const Eigen::MatrixXd& rows);

struct HistogramBin {
    double lo, hi;
    long count = 0;
};

struct EscapeReport {
    long samples = 0;
    double threshold = 0;
    long escape_count = 0;
    double escape_fraction = 0;
    double delta_value = 0;
    bool delta_certified = false;
    std::vector<HistogramBin> histogram;  // lambda_1 histogram, fixed log bins
};

/// Monte Carlo non-divergence experiment: samples o_j = (h0 exp x_j)^{-1}
/// with x_j quasi-uniform in the window, computes lambda_1 of
/// Z^n · (gamma o_j gamma^{-1} g), and reports the escape fraction below the
/// threshold together with the delta of the translate. Deterministic given
/// the seed, independent of thread count.
EscapeReport km_escape_experiment(const SubgroupSpec& h, const Eigen::MatrixXd& g, const IMat& gamma,
                                  long samples, double threshold, uint64_t seed,
                                  ExecMode mode = ExecMode::parallel);

}  // namespace slnd
