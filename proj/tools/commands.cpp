#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dsd/error.hpp"
#include "dsd/kernels.hpp"
#include "dsd/mesoscopic.hpp"
#include "dsd/metrics.hpp"
#include "dsd/netbio.hpp"
#include "dsd/spectral.hpp"
#include "dsd/synth.hpp"

namespace fs = std::filesystem;

namespace dsd::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Creates the directory and proves it is writable before any compute starts.
std::string prepare_dir(const std::string& dir) {
    if (dir.empty()) throw invalid_input("an output directory is required");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path probe = fs::path(dir) / ".dsd_write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw io_error("output directory '" + dir + "' is not writable");
    }
    fs::remove(probe, ec);
    return dir;
}

void prepare_file(const std::string& path) {
    if (path.empty()) throw invalid_input("an output path is required");
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) prepare_dir(parent.string());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

/// Reads a graph and restricts it to its largest component, recording both
/// sizes in the header.
WeightedGraph load_connected(const std::string& path, io::Header& header) {
    const WeightedGraph raw = io::read_graph(path);
    WeightedGraph g = largest_connected_component(raw);
    header.emplace_back("input_nodes", std::to_string(raw.n()));
    header.emplace_back("lcc_nodes", std::to_string(g.n()));
    header.emplace_back("lcc_edges", std::to_string(g.edge_count()));
    return g;
}

WeightMode parse_weight(const std::string& s) {
    if (s == "inverse_pi") return WeightMode::inverse_pi;
    if (s == "one") return WeightMode::one;
    throw invalid_input("unknown weight mode '" + s + "'");
}

EigOptions::Method parse_method(const std::string& s) {
    if (s == "automatic") return EigOptions::Method::automatic;
    if (s == "dense") return EigOptions::Method::dense;
    if (s == "lanczos") return EigOptions::Method::lanczos;
    throw invalid_input("unknown eigensolver '" + s + "'");
}

/// Eigenpairs, from the cache when it matches the graph.
SpectralBasis basis_for(const WeightedGraph& g, const DiffusionOperator& op, int M, const EigOptions& opts,
                        const std::string& cache, io::Header& header) {
    const std::uint64_t key = io::graph_hash(g);
    if (!cache.empty()) {
        if (auto b = io::load_basis(cache, key); b && b->M() >= M) {
            header.emplace_back("eig_cache", "hit");
            SpectralBasis out;
            out.mu = b->mu.head(M);
            out.phi = b->phi.leftCols(M);
            out.lambda = b->lambda.head(M);
            out.psi = b->psi.leftCols(M);
            out.max_residual = basis_residual(op, out);
            return out;
        }
    }
    SpectralBasis b = M == g.n() ? eig_full(op) : eig_topk(op, M, opts);
    if (!cache.empty()) {
        io::save_basis(cache, b, key);
        header.emplace_back("eig_cache", "stored");
    }
    return b;
}

SpectralBasis leading(const SpectralBasis& b, int M) {
    SpectralBasis out;
    out.mu = b.mu.head(M);
    out.phi = b.phi.leftCols(M);
    out.lambda = b.lambda.head(M);
    out.psi = b.psi.leftCols(M);
    out.max_residual = b.max_residual;
    return out;
}

void write_rows(const std::string& path, const io::Header& header, const std::string& columns,
                const std::vector<std::string>& rows) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    io::write_header(out, header);
    out << columns << '\n';
    for (const auto& r : rows) out << r << '\n';
    out.flush();
    if (!out) throw io_error("write to '" + path + "' failed");
}

std::string csv(std::initializer_list<std::string> fields) {
    std::string s;
    for (const auto& f : fields) {
        if (!s.empty()) s += ',';
        s += f;
    }
    return s;
}

std::string num(double v) { return io::format_double(v); }

}  // namespace

void run_graph(const GraphArgs& a, io::Header header) {
    prepare_file(a.out);
    const WeightedGraph raw = io::read_graph(a.input);
    const auto comps = connected_components(raw);
    const int K = comps.empty() ? 0 : *std::max_element(comps.begin(), comps.end()) + 1;
    const WeightedGraph g = a.lcc ? largest_connected_component(raw) : raw;
    header.emplace_back("nodes", std::to_string(g.n()));
    header.emplace_back("edges", std::to_string(g.edge_count()));
    header.emplace_back("input_components", std::to_string(K));
    io::write_edge_list(a.out, g, header);
    std::cout << "nodes=" << g.n() << " edges=" << g.edge_count() << " input_components=" << K << '\n';
}

void run_synth(const SynthArgs& a, io::Header header) {
    const std::string dir = prepare_dir(a.out_dir);
    auto emit = [&](const WeightedGraph& g, const std::vector<std::pair<std::string, const Partition*>>& parts,
                    const Matrix& points) {
        io::Header h = header;
        h.emplace_back("nodes", std::to_string(g.n()));
        h.emplace_back("edges", std::to_string(g.edge_count()));
        io::write_edge_list(join(dir, "graph.tsv"), g, h);
        for (const auto& [name, p] : parts) io::write_partition(join(dir, name + ".txt"), g, *p, h);
        if (points.size() > 0) io::write_points_csv(join(dir, "points.csv"), points, parts.front().second->labels(), h);
        std::cout << "nodes=" << g.n() << " edges=" << g.edge_count() << '\n';
    };
    if (a.model == "hsbm" || a.model == "lowrank") {
        SbmSpec spec = hierarchical_sbm_spec(a.seed);
        const LabeledGraph lg = a.model == "hsbm" ? gen_hsbm(spec) : gen_lowrank_block(spec);
        emit(lg.graph, {{"partition", &lg.partition}}, lg.points);
    } else if (a.model == "mixture3") {
        const LabeledGraph lg = gen_gaussian_mixture(three_gaussian_means(), 1.0, a.per_cluster, 1.0, a.seed);
        emit(lg.graph, {{"partition", &lg.partition}}, lg.points);
    } else if (a.model == "mixture4") {
        const GaussianScales s = gen_four_gaussian_scales(a.per_cluster, a.seed);
        emit(s.data.graph, {{"fine", &s.fine}, {"middle", &s.middle}, {"coarse", &s.coarse}}, s.data.points);
    } else if (a.model == "ring") {
        const RingGaussianBar r = gen_ring_gaussian_bar(a.seed);
        emit(r.graph, {{"fine", &r.fine}, {"coarse", &r.coarse}}, r.points);
    } else {
        throw invalid_input("unknown model '" + a.model + "'");
    }
}

void run_dsd(const DsdArgs& a, io::Header header) {
    const std::string dir = prepare_dir(a.out_dir);
    const WeightMode weight = parse_weight(a.weight);
    const WeightedGraph g = load_connected(a.graph, header);
    const DiffusionOperator op = diffusion_operator(g);
    std::vector<std::string> timing;

    DsdEmbedding emb;
    DistanceMatrix dist;
    const auto t0 = Clock::now();
    if (a.mode == "exact") {
        emb = dsd_exact_embedding(op, weight);
        timing.push_back(csv({"exact_inverse", num(seconds_since(t0))}));
    } else if (a.mode == "spectral" || a.mode == "approx") {
        if (weight != WeightMode::inverse_pi) throw invalid_input("spectral DSD is defined for --weight inverse_pi only");
        const int M = a.mode == "spectral" ? g.n() : a.M;
        if (M < 2 || M > g.n()) throw invalid_input("--M must lie in [2, n]");
        EigOptions opts;
        const SpectralBasis basis = basis_for(g, op, M, opts, a.cache, header);
        timing.push_back(csv({"eigenpairs", num(seconds_since(t0))}));
        header.emplace_back("M", std::to_string(M));
        header.emplace_back("eig_max_residual", num(basis.max_residual));
        emb = dsd_embedding(basis);
    } else {
        throw invalid_input("unknown mode '" + a.mode + "'");
    }
    const auto t1 = Clock::now();
    dist = dsd_truncated(emb);
    if (a.mode == "exact") dist.kind = DistanceKind::dsd_exact;
    if (a.mode == "spectral") dist.kind = DistanceKind::dsd_spectral;
    timing.push_back(csv({"distances", num(seconds_since(t1))}));
    const double total = seconds_since(t0);
    timing.push_back(csv({"total", num(total)}));

    if (a.compare_exact && a.mode != "exact") {
        const auto t2 = Clock::now();
        const DistanceMatrix exact = dsd_exact(op, weight);
        const double exact_s = seconds_since(t2);
        timing.push_back(csv({"exact_total", num(exact_s)}));
        timing.push_back(csv({"time_ratio", num(total / exact_s)}));
        timing.push_back(csv({"max_abs_diff", num((exact.values - dist.values).cwiseAbs().maxCoeff())}));
    }

    io::write_distance_csv(join(dir, "distances.csv"), dist, g.node_ids(), header);
    io::write_embedding_tsv(join(dir, "embedding.tsv"), emb, g.node_ids(), header);
    write_rows(join(dir, "timing.csv"), header, "stage,seconds", timing);
    for (const auto& r : timing) std::cout << r << '\n';
}

void run_eig(const EigArgs& a, io::Header header) {
    prepare_file(a.out);
    const WeightedGraph g = load_connected(a.graph, header);
    if (a.M < 1 || a.M > g.n()) throw invalid_input("--M must lie in [1, n]");
    const DiffusionOperator op = diffusion_operator(g);
    EigOptions opts;
    opts.method = parse_method(a.method);
    const auto t0 = Clock::now();
    const SpectralBasis b = basis_for(g, op, std::max(a.M, 2), opts, a.cache, header);
    const SpectralBasis out = leading(b, a.M);
    header.emplace_back("seconds", num(seconds_since(t0)));
    header.emplace_back("max_residual", num(out.max_residual));
    io::write_eigenvalues_csv(a.out, out, header);
}

void run_meso(const MesoArgs& a, io::Header header) {
    const std::string dir = prepare_dir(a.out_dir);
    WeightedGraph g;
    std::vector<std::pair<std::string, Partition>> parts;
    if (!a.synth.empty()) {
        if (!a.graph.empty()) throw invalid_input("give either --graph or --synth, not both");
        if (a.synth == "mixture4") {
            GaussianScales s = gen_four_gaussian_scales(a.per_cluster, a.seed);
            g = s.data.graph;
            parts = {{"fine", s.fine}, {"middle", s.middle}, {"coarse", s.coarse}};
        } else if (a.synth == "ring") {
            RingGaussianBar r = gen_ring_gaussian_bar(a.seed);
            g = r.graph;
            parts = {{"fine", r.fine}, {"coarse", r.coarse}};
        } else {
            throw invalid_input("--synth must be mixture4 or ring");
        }
        if (!is_connected(g)) throw numerical_error("sampled point cloud gives a disconnected kernel graph");
    } else {
        if (a.graph.empty()) throw invalid_input("--graph or --synth is required");
        g = io::read_graph(a.graph);
        if (!is_connected(g)) throw invalid_input("meso needs a connected graph; extract its largest component first");
        for (const auto& path : a.partitions) parts.emplace_back(fs::path(path).stem().string(), io::read_partition(path, g));
    }
    if (a.with_trivial || parts.empty()) parts.emplace_back("trivial", Partition::trivial(g.n()));
    if (a.t_max < 1) throw invalid_input("--t-max must be at least 1");

    const DiffusionOperator op = diffusion_operator(g);
    std::vector<MesoscopicCertificate> certs;
    std::vector<std::string> names, rows;
    for (const auto& [name, p] : parts) {
        certs.push_back(stochastic_complement(op, p));
        const auto& c = certs.back();
        names.push_back(name);
        std::string warn;
        for (const auto& w : c.warnings) warn += (warn.empty() ? "" : "; ") + w;
        rows.push_back(csv({name, std::to_string(p.K()), num(c.delta), num(c.kappa), num(c.lambda_star),
                            "\"" + warn + "\""}));
        for (const auto& w : c.warnings) std::cerr << "warning: " << name << ": " << w << '\n';
    }
    const ResidualCurve rc = residual_curve(op, certs, a.t_max);
    io::write_residual_curve_csv(join(dir, "residual_curve.csv"), rc, names, header);
    write_rows(join(dir, "certificates.csv"), header, "partition,K,delta,kappa,lambda_star,warnings", rows);
    for (const auto& r : rows) std::cout << r << '\n';
}

void run_linkpred(const LinkPredArgs& a, io::Header header) {
    const std::string dir = prepare_dir(a.out_dir);
    const WeightedGraph g = load_connected(a.graph, header);
    LinkPredictionConfig cfg;
    cfg.trials = a.trials;
    cfg.n_sub = std::min(a.nodes, g.n());
    cfg.removal_frac = a.removal_frac;
    cfg.top_n = a.top_n;
    cfg.seed = a.seed;
    cfg.approx_M = a.approx_M;
    if (!a.methods.empty()) cfg.methods = a.methods;
    const LinkPredictionResult res = run_link_prediction(g, cfg);
    header.emplace_back("removal_shortfall", std::to_string(res.total_shortfall));
    header.emplace_back("f1_sweep", "every rank");
    header.emplace_back("auc", "unnormalized trapezoid over the realized fpr range");

    std::vector<std::string> curves, summary;
    for (const auto& m : res.methods) {
        for (std::size_t r = 0; r < m.f1_mean.size(); ++r)
            curves.push_back(csv({m.method, std::to_string(r + 1), num(m.precision_mean[r]), num(m.precision_sd[r]),
                                  num(m.recall_mean[r]), num(m.recall_sd[r]), num(m.tpr_mean[r]), num(m.tpr_sd[r]),
                                  num(m.fpr_mean[r]), num(m.fpr_sd[r]), num(m.f1_mean[r]), num(m.f1_sd[r])}));
        summary.push_back(csv({m.method, num(m.auc_mean), num(m.auc_sd), num(m.peak_f1)}));
    }
    write_rows(join(dir, "curves.csv"), header,
               "method,rank,precision_mean,precision_sd,recall_mean,recall_sd,tpr_mean,tpr_sd,fpr_mean,fpr_sd,f1_mean,"
               "f1_sd",
               curves);
    write_rows(join(dir, "summary.csv"), header, "method,auc_mean,auc_sd,peak_f1", summary);
    for (const auto& r : summary) std::cout << r << '\n';
}

void run_funcpred(const FuncPredArgs& a, io::Header header) {
    prepare_file(a.out);
    if (a.labels.empty() == a.partition.empty()) throw invalid_input("give exactly one of --labels or --partition");
    const WeightedGraph g = load_connected(a.graph, header);
    LabelTable labels;
    if (!a.labels.empty()) {
        labels = make_label_table(g, io::read_labels(a.labels));
        header.emplace_back("unmatched_label_nodes", std::to_string(labels.unmatched.size()));
    } else {
        labels = label_table_from_partition(io::read_partition(a.partition, g).labels());
    }
    labels = label_filter(labels, a.min_count, a.max_count);
    header.emplace_back("labels_kept", std::to_string(labels.label_names.size()));
    header.emplace_back("labeled_nodes", std::to_string(labels.labeled_count()));

    std::vector<int> grid;
    for (const auto& s : a.M_grid) {
        int M = 0;
        if (s == "n") {
            M = g.n();
        } else {
            try {
                M = std::stoi(s);
            } catch (const std::exception&) {
                throw invalid_input("bad --M-grid entry '" + s + "'");
            }
        }
        if (M < 2 || M > g.n()) throw invalid_input("--M-grid entries must lie in [2, n]");
        grid.push_back(M);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty()) throw invalid_input("--M-grid is empty");

    const DiffusionOperator op = diffusion_operator(g);
    const SpectralBasis basis = grid.back() == g.n() ? eig_full(op) : eig_topk(op, grid.back());
    const double baseline = majority_vote_baseline(g, labels, a.folds, a.seed).accuracy;
    std::vector<std::string> rows;
    for (int M : grid) {
        const DsdEmbedding emb = dsd_embedding(leading(basis, M));
        const PredictionResult r = predict_function(emb, g.node_ids(), labels, a.folds, a.k, a.seed);
        rows.push_back(csv({std::to_string(M), num(r.accuracy), num(baseline), std::to_string(r.tested)}));
    }
    write_rows(a.out, header, "M,accuracy,baseline,tested", rows);
    for (const auto& r : rows) std::cout << r << '\n';
}

}  // namespace dsd::cli
