#include "slnd/instability.hpp"
#include "slnd/kernels.hpp"
#include "slnd/nondivergence.hpp"
#include "slnd/parabolic.hpp"
#include "slnd/textio.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <fstream>
#include <iostream>
#include <optional>

using namespace slnd;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string output_path;
    std::string histogram_path;
    std::optional<uint64_t> seed;
    int threads = 0;
};

ExecMode mode_of(const GlobalOpts& g) {
    if (g.threads == 1) return ExecMode::serial;
    if (g.threads > 1) omp_set_num_threads(g.threads);
    return ExecMode::parallel;
}

Json load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) throw std::invalid_argument("missing --config");
    std::ifstream in(g.config_path);
    if (!in) throw std::invalid_argument(g.config_path + ": cannot open");
    Json j = Json::parse(in);  // parse_error carries line/column
    if (!j.contains("schema") || j["schema"] != 1)
        throw std::invalid_argument(g.config_path + ": expected \"schema\": 1");
    return j;
}

const Json& field(const Json& j, const std::string& key) {
    if (!j.contains(key)) throw std::invalid_argument("config: missing field '" + key + "'");
    return j.at(key);
}

uint64_t seed_of(const Json& j, const GlobalOpts& g) {
    if (g.seed) return *g.seed;
    return field(j, "seed").get<uint64_t>();
}

std::vector<int> parse_blocks(const std::string& s) {
    std::vector<int> blocks;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) blocks.push_back(std::stoi(tok));
    return blocks;
}

QMat load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(path + ": cannot open");
    return parse_matrix_text(in);
}

SubgroupSpec subgroup_from_json(const Json& j) {
    SubgroupSpec h;
    h.n = field(j, "n").get<int>();
    for (const auto& b : field(j, "lie_basis")) h.lie_basis.push_back(to_eigen(matrix_from_json(b)));
    if (j.contains("h0")) h.h0 = to_eigen(matrix_from_json(j.at("h0")));
    for (const auto& box : field(j, "window"))
        h.window.box.emplace_back(box.at(0).get<double>(), box.at(1).get<double>());
    const Json& src = field(j, "stable_source");
    std::string kind = field(src, "kind").get<std::string>();
    if (kind == "torus") {
        TorusSource t;
        for (const auto& w : field(src, "weights")) t.weights.push_back(w.get<int64_t>());
        h.stable_source = t;
    } else if (kind == "explicit") {
        ExplicitSource e;
        for (const auto& rows : field(src, "modules")) {
            QMat q = matrix_from_json(rows);
            IMat m(q.rows(), q.cols());
            for (int i = 0; i < q.rows(); ++i)
                for (int c = 0; c < q.cols(); ++c) {
                    if (boost::multiprecision::denominator(q(i, c)) != 1)
                        throw std::invalid_argument("config: module rows must be integral");
                    m(i, c) = boost::multiprecision::numerator(q(i, c));
                }
            e.modules.push_back(LatticeModule::from_rows(h.n, m));
        }
        h.stable_source = e;
    } else if (kind == "algebra") {
        h.stable_source = AlgebraClosureSource{};
    } else {
        throw std::invalid_argument("config: unknown stable_source kind '" + kind + "'");
    }
    h.validate();
    return h;
}

IMat imat_from_json(const Json& j) {
    QMat q = matrix_from_json(j);
    IMat m(q.rows(), q.cols());
    for (int i = 0; i < q.rows(); ++i)
        for (int c = 0; c < q.cols(); ++c) {
            if (boost::multiprecision::denominator(q(i, c)) != 1)
                throw std::invalid_argument("config: integral matrix expected");
            m(i, c) = boost::multiprecision::numerator(q(i, c));
        }
    return m;
}

Json coords_to_json(const HorosphericalCoords& c) {
    Json j;
    j["u"] = matrix_to_json(c.u);
    j["a"] = matrix_to_json(c.a);
    j["m"] = matrix_to_json(c.m);
    j["k"] = matrix_to_json(c.k);
    j["block_scalars"] = c.block_scalars;
    return j;
}

Json module_to_json(const LatticeModule& m) { return matrix_to_json(to_rat(m.basis())); }

void emit(const Json& report, const GlobalOpts& g) {
    std::string text = json_dump_17(report);
    if (g.output_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(g.output_path);
        if (!out) throw std::invalid_argument(g.output_path + ": cannot open for writing");
        out << text;
    }
}

void emit_histogram_csv(const EscapeReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument(path + ": cannot open for writing");
    out << "bin_low,bin_high,count\n";
    for (const auto& bin : rep.histogram)
        out << format_double17(bin.lo) << "," << format_double17(bin.hi) << "," << bin.count << "\n";
}

Json escape_to_json(const EscapeReport& rep) {
    Json j;
    j["schema"] = 1;
    j["command"] = "km-escape";
    j["samples"] = rep.samples;
    j["threshold"] = rep.threshold;
    j["escape_count"] = rep.escape_count;
    j["escape_fraction"] = rep.escape_fraction;
    j["delta"] = Json{{"value", rep.delta_value}, {"certified", rep.delta_certified}};
    Json hist = Json::array();
    for (const auto& bin : rep.histogram)
        hist.push_back(Json{{"bin_low", bin.lo}, {"bin_high", bin.hi}, {"count", bin.count}});
    j["lambda1_histogram"] = hist;
    return j;
}

ScalarField field_from_json(const Json& j, Window& window_out, GoodnessParams& params_out) {
    params_out.c = field(j, "C").get<double>();
    params_out.alpha = field(j, "alpha").get<double>();
    const Json& f = field(j, "field");
    std::string kind = field(f, "kind").get<std::string>();
    if (kind == "poly") {
        // |sum c_k x^k| on a 1-d window
        std::vector<double> coeffs;
        for (const auto& c : field(f, "coeffs")) coeffs.push_back(c.get<double>());
        window_out.box = {{field(f, "window").at(0).get<double>(),
                           field(f, "window").at(1).get<double>()}};
        return [coeffs](const std::vector<double>& x) {
            double v = 0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x[0] + *it;
            return v;
        };
    }
    if (kind == "composite") {
        SubgroupSpec h = subgroup_from_json(field(f, "H"));
        window_out = h.window;
        Eigen::MatrixXd g = to_eigen(matrix_from_json(field(f, "g")));
        Eigen::MatrixXd gamma = f.contains("gamma") ? to_eigen(matrix_from_json(f.at("gamma")))
                                                    : Eigen::MatrixXd::Identity(h.n, h.n);
        QMat wq = matrix_from_json(field(f, "W"));
        IMat wi(wq.rows(), wq.cols());
        for (int i = 0; i < wq.rows(); ++i)
            for (int c = 0; c < wq.cols(); ++c) wi(i, c) = boost::multiprecision::numerator(wq(i, c));
        LatticeModule w = LatticeModule::from_rows(h.n, wi);
        return composite_field(g, gamma, w, h);
    }
    throw std::invalid_argument("config: unknown field kind '" + kind + "'");
}

int run_command(const std::string& cmd, const GlobalOpts& g, CLI::App* sub) {
    if (cmd == "decompose") {
        QMat m = load_matrix_file(sub->get_option("--matrix")->as<std::string>());
        StandardParabolic p(parse_blocks(sub->get_option("--blocks")->as<std::string>()));
        HorosphericalCoords c = horospherical_decompose(to_eigen(m), p);
        Json j;
        j["schema"] = 1;
        j["command"] = "decompose";
        j["blocks"] = p.blocks();
        j["coords"] = coords_to_json(c);
        j["roots"] = simple_root_values(p, c);
        j["reassembly_error"] = (c.assemble() - to_eigen(m)).cwiseAbs().maxCoeff();
        emit(j, g);
        return 0;
    }

    if (cmd == "relative-check") {
        QMat m = load_matrix_file(sub->get_option("--matrix")->as<std::string>());
        StandardParabolic p(parse_blocks(sub->get_option("--blocks")->as<std::string>()));
        RootSubset i;
        for (int s : parse_blocks(sub->get_option("--subset")->as<std::string>()))
            i.included.insert(s);
        double tol = sub->get_option("--tol")->as<double>();
        auto rep = relative_compatibility_check(to_eigen(m), p, i);
        Json j;
        j["schema"] = 1;
        j["command"] = "relative-check";
        j["u_dev"] = rep.u_dev;
        j["a_dev"] = rep.a_dev;
        j["mk_dev"] = rep.mk_dev;
        j["max_dev"] = rep.max_dev;
        j["pass"] = rep.max_dev < tol;
        emit(j, g);
        return rep.max_dev < tol ? 0 : 1;
    }

    if (cmd == "siegel-reduce") {
        QMat m = load_matrix_file(sub->get_option("--matrix")->as<std::string>());
        SiegelReduction r = reduce_to_siegel(to_eigen(m));
        Json j;
        j["schema"] = 1;
        j["command"] = "siegel-reduce";
        j["gamma"] = matrix_to_json(to_rat(r.gamma));
        j["coords"] = coords_to_json(r.coords);
        j["exact_layer"] = r.exact_layer;
        j["siegel_t"] = r.verified_in.t;
        j["verified"] = r.verified;
        emit(j, g);
        return r.verified ? 0 : 1;
    }

    if (cmd == "boundary-classify") {
        std::ifstream in(sub->get_option("--trajectory")->as<std::string>());
        if (!in) throw std::invalid_argument("cannot open trajectory file");
        std::vector<QMat> mats = parse_matrices_text(in);
        std::vector<Eigen::MatrixXd> traj;
        for (const auto& m : mats) traj.push_back(to_eigen(m));
        StandardParabolic p(parse_blocks(sub->get_option("--blocks")->as<std::string>()));
        double thr = sub->get_option("--threshold")->as<double>();
        double lo = sub->get_option("--band-lo")->as<double>();
        double hi = sub->get_option("--band-hi")->as<double>();
        BoundaryReport rep = boundary_classify(traj, p, thr, {lo, hi});
        Json j;
        j["schema"] = 1;
        j["command"] = "boundary-classify";
        Json roots = Json::array();
        for (size_t i = 0; i < rep.fates.size(); ++i) {
            const char* fate = rep.fates[i] == RootFate::divergent   ? "divergent"
                               : rep.fates[i] == RootFate::bounded   ? "bounded"
                                                                     : "unclassified";
            roots.push_back(Json{{"index", i}, {"fate", fate}, {"final", rep.final_roots[i]}});
        }
        j["roots"] = roots;
        j["I"] = std::vector<int>(rep.bounded_roots.included.begin(), rep.bounded_roots.included.end());
        j["outcome"] = rep.outcome == BoundaryReport::Outcome::interior    ? "interior"
                       : rep.outcome == BoundaryReport::Outcome::boundary ? "boundary"
                                                                          : "unclassified";
        if (rep.stratum) {
            j["stratum_blocks"] = rep.stratum->blocks();
            j["u_limit"] = matrix_to_json(rep.u_limit);
            j["residual"] = matrix_to_json(rep.residual);
        }
        emit(j, g);
        return 0;
    }

    if (cmd == "delta") {
        Json cfg = load_config(g);
        SubgroupSpec h = subgroup_from_json(field(cfg, "H"));
        QMat gm = matrix_from_json(field(cfg, "g"));
        Json j;
        j["schema"] = 1;
        j["command"] = "delta";
        DeltaResult d = det_q(gm) == 1 ? delta(GroupElementQ(gm), h) : delta(to_eigen(gm), h);
        j["value"] = d.value;
        j["certified"] = d.certified;
        j["argmin"] = d.argmin;
        emit(j, g);
        return 0;
    }

    if (cmd == "stable-subspaces") {
        Json cfg = load_config(g);
        SubgroupSpec h = subgroup_from_json(field(cfg, "H"));
        StableFamily fam = stable_subspaces(h);
        Json j;
        j["schema"] = 1;
        j["command"] = "stable-subspaces";
        Json mods = Json::array();
        for (const auto& m : fam.modules) mods.push_back(module_to_json(m));
        j["modules"] = mods;
        Json strata = Json::array();
        for (const auto& s : fam.infinite_strata) strata.push_back(module_to_json(s));
        j["infinite_strata"] = strata;
        j["certified"] = fam.certified();
        emit(j, g);
        return 0;
    }

    if (cmd == "cgood-check") {
        Json cfg = load_config(g);
        Window window;
        GoodnessParams params;
        ScalarField f = field_from_json(cfg, window, params);
        long n_balls = field(cfg, "n_balls").get<long>();
        int n_eps = field(cfg, "n_eps").get<int>();
        CgoodReport rep = cgood_check(f, window, params, n_balls, n_eps, seed_of(cfg, g), mode_of(g));
        Json j;
        j["schema"] = 1;
        j["command"] = "cgood-check";
        j["balls_tested"] = rep.balls_tested;
        j["balls_skipped"] = rep.balls_skipped;
        j["worst_ratio"] = rep.worst_ratio;
        Json viol = Json::array();
        for (const auto& v : rep.violations)
            viol.push_back(Json{{"ball", v.ball},
                                {"eps", v.eps},
                                {"measure_est", v.measure_est},
                                {"bound", v.bound},
                                {"sup_est", v.sup_est}});
        j["violations"] = viol;
        j["pass"] = rep.passed();
        emit(j, g);
        return rep.passed() ? 0 : 1;
    }

    if (cmd == "prop42-verify") {
        Json cfg = load_config(g);
        SubgroupSpec h = subgroup_from_json(field(cfg, "H"));
        Eigen::MatrixXd gm = to_eigen(matrix_from_json(field(cfg, "g")));
        double eta = field(cfg, "eta").get<double>();
        int height = field(cfg, "height_bound").get<int>();
        GoodnessParams params{field(cfg, "C").get<double>(), field(cfg, "alpha").get<double>()};
        Int z0(cfg.value("z0", 1));
        int grid = cfg.value("grid", 1000);
        Prop42Report rep = prop42_verify(gm, h, eta, height, params, z0, grid, mode_of(g));
        Json j;
        j["schema"] = 1;
        j["command"] = "prop42-verify";
        j["hypothesis_ok"] = rep.hypothesis_ok;
        j["hypothesis_value"] = rep.hypothesis_value;
        j["eta"] = rep.eta;
        Json dims = Json::array();
        for (const auto& d : rep.dims)
            dims.push_back(Json{{"dim", d.dim},
                                {"eps_cascade", d.eps_cascade},
                                {"min_sup", d.min_sup},
                                {"subspaces", d.subspace_count},
                                {"argmin", module_to_json(d.argmin)}});
        j["dims"] = dims;
        j["outcome"] = rep.hypothesis_ok ? (rep.pass ? "pass" : "fail") : "hypothesis-failed";
        j["pass"] = rep.pass;
        emit(j, g);
        return rep.pass ? 0 : 1;
    }

    if (cmd == "xi-chain") {
        Json cfg = load_config(g);
        int n = field(cfg, "n").get<int>();
        LatticeModule w = LatticeModule::from_rows(n, imat_from_json(field(cfg, "W")));
        std::vector<QMat> xi;
        for (const auto& x : field(cfg, "xi")) xi.push_back(matrix_from_json(x));
        QMat gm = cfg.contains("g") ? matrix_from_json(cfg.at("g")) : QMat::identity(n);
        XiChainResult r = xi_chain(w, xi, seed_of(cfg, g), gm);
        Json j;
        j["schema"] = 1;
        j["command"] = "xi-chain";
        j["chain"] = r.chain;
        Json lambdas = Json::array();
        for (const auto& m : r.lambdas) lambdas.push_back(module_to_json(m));
        j["lambdas"] = lambdas;
        Json primed = Json::array();
        for (const auto& m : r.lambda_primed) primed.push_back(module_to_json(m));
        j["lambda_primed"] = primed;
        j["sum_closure"] = module_to_json(r.sum_closure);
        j["z0"] = r.z0.str();
        j["lhs_sq"] = rational_to_string(r.lhs_sq);
        j["rhs_sq"] = rational_to_string(r.rhs_sq);
        j["inequality_holds"] = r.inequality_holds;
        emit(j, g);
        return r.inequality_holds ? 0 : 1;
    }

    if (cmd == "km-escape") {
        Json cfg = load_config(g);
        SubgroupSpec h = subgroup_from_json(field(cfg, "H"));
        Eigen::MatrixXd gm = to_eigen(matrix_from_json(field(cfg, "g")));
        IMat gamma = cfg.contains("gamma") ? imat_from_json(cfg.at("gamma")) : IMat::identity(h.n);
        long samples = field(cfg, "samples").get<long>();
        double threshold = field(cfg, "threshold").get<double>();
        EscapeReport rep =
            km_escape_experiment(h, gm, gamma, samples, threshold, seed_of(cfg, g), mode_of(g));
        emit(escape_to_json(rep), g);
        if (!g.histogram_path.empty()) emit_histogram_csv(rep, g.histogram_path);
        return 0;
    }

    if (cmd == "fuzz-submodularity") {
        int n = sub->get_option("--n")->as<int>();
        long pairs = sub->get_option("--pairs")->as<long>();
        uint64_t seed = g.seed ? *g.seed : 0;
        FuzzReport rep = fuzz_submodularity(n, pairs, seed, mode_of(g));
        Json j;
        j["schema"] = 1;
        j["command"] = "fuzz-submodularity";
        j["n"] = rep.n;
        j["pairs"] = rep.pairs;
        j["violations"] = rep.violations;
        j["min_ratio"] = rep.min_ratio;
        if (rep.first_violation) {
            j["first_violation"] = Json{{"index", rep.first_violation->index},
                                        {"A", rep.first_violation->a},
                                        {"B", rep.first_violation->b},
                                        {"g", rep.first_violation->g}};
        }
        emit(j, g);
        return rep.violations == 0 ? 0 : 1;
    }

    if (cmd == "instability") {
        Json cfg = load_config(g);
        WeightedVector v;
        v.n = field(cfg, "n").get<int>();
        for (const auto& s : field(cfg, "summands")) {
            ExteriorVector ev;
            ev.n = v.n;
            ev.degree = field(s, "degree").get<int>();
            for (const auto& [key, val] : field(s, "components").items()) {
                uint32_t mask = 0;
                std::stringstream ss(key);
                std::string tok;
                while (std::getline(ss, tok, ',')) mask |= 1u << (std::stoi(tok) - 1);
                ev.comps.emplace_back(mask, parse_rational(val.get<std::string>()));
            }
            std::sort(ev.comps.begin(), ev.comps.end(),
                      [](auto& a, auto& b) { return a.first < b.first; });
            v.summands.push_back(ev);
        }
        TorusInstabilityResult res = torus_instability(v);
        Json j;
        j["schema"] = 1;
        j["command"] = "instability";
        if (res.destabilizing) {
            j["unstable"] = true;
            j["cocharacter"] = res.destabilizing->weights();
        } else {
            j["unstable"] = false;
            Json lam = Json::array();
            for (const auto& l : res.hull_coefficients) lam.push_back(rational_to_string(l));
            j["hull_coefficients"] = lam;
            j["hull_level"] = rational_to_string(res.hull_level);
        }
        emit(j, g);
        return 0;
    }

    if (cmd == "flag-cochar") {
        Json cfg = load_config(g);
        std::vector<std::vector<int64_t>> weights;
        for (const auto& w : field(cfg, "weights")) weights.push_back(w.get<std::vector<int64_t>>());
        Cocharacter b = flag_cocharacter(weights);
        Json j;
        j["schema"] = 1;
        j["command"] = "flag-cochar";
        j["cocharacter"] = b.weights();
        emit(j, g);
        return 0;
    }

    if (cmd == "embed-check") {
        Json cfg = load_config(g);
        BlockEmbedding emb{field(cfg, "m").get<int>(), field(cfg, "N").get<int>(),
                           cfg.value("copies", 1)};
        std::vector<int64_t> aw;
        for (const auto& w : field(cfg, "a")) aw.push_back(w.get<int64_t>());
        Cocharacter a(aw);
        long samples = field(cfg, "samples").get<long>();
        double tol = cfg.value("tol", 1e-8);
        Rng rng(seed_of(cfg, g));
        double worst = 0;
        for (long i = 0; i < samples; ++i) {
            EmbeddingReport rep = embedding_compatibility_check(random_sl(emb.m, rng), emb, a);
            worst = std::max(worst, rep.max_dev);
        }
        Json j;
        j["schema"] = 1;
        j["command"] = "embed-check";
        j["samples"] = samples;
        j["max_dev"] = worst;
        j["tol"] = tol;
        j["pass"] = worst < tol;
        emit(j, g);
        return worst < tol ? 0 : 1;
    }

    throw std::invalid_argument("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slnd: desk-scale non-divergence experiments on SL(n)"};
    app.require_subcommand(1);
    GlobalOpts g;

    std::vector<std::string> commands = {
        "decompose",    "relative-check",     "siegel-reduce", "boundary-classify",
        "delta",        "stable-subspaces",   "cgood-check",   "prop42-verify",
        "xi-chain",     "km-escape",          "fuzz-submodularity", "instability",
        "flag-cochar",  "embed-check"};
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", g.config_path, "JSON config file");
        sub->add_option("--output", g.output_path, "write the JSON report here (default stdout)");
        sub->add_option("--seed", "override the config seed")->check(CLI::NonNegativeNumber);
        sub->add_option("--threads", g.threads, "worker threads (1 = serial reference)");
        subs[name] = sub;
    }
    for (const auto& name : {"decompose", "relative-check", "siegel-reduce"})
        subs[name]->add_option("--matrix", "matrix text file")->required();
    for (const auto& name : {"decompose", "relative-check", "boundary-classify"})
        subs[name]->add_option("--blocks", "composition, comma separated")->required();
    subs["relative-check"]->add_option("--subset", "root slots to merge, comma separated")->required();
    subs["relative-check"]->add_option("--tol", "pass threshold")->default_val(1e-8);
    subs["boundary-classify"]->add_option("--trajectory", "trajectory text file")->required();
    subs["boundary-classify"]->add_option("--threshold", "divergence threshold")->default_val(1e3);
    subs["boundary-classify"]->add_option("--band-lo", "bounded band, lower")->default_val(1e-2);
    subs["boundary-classify"]->add_option("--band-hi", "bounded band, upper")->default_val(1e2);
    subs["km-escape"]->add_option("--histogram", g.histogram_path, "CSV histogram path");
    subs["fuzz-submodularity"]->add_option("--n", "ambient dimension")->required();
    subs["fuzz-submodularity"]->add_option("--pairs", "number of random pairs")->default_val(10000);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) g.seed = sub->get_option("--seed")->as<uint64_t>();

    try {
        return run_command(sub->get_name(), g, sub);
    } catch (const Json::parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
