#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <new>

#include "commands.hpp"
#include "dsd/error.hpp"
#include "dsd/kernels.hpp"
#include "dsd/version.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;
constexpr int kExitIo = 4;

/// Every option of the chosen subcommand, as given or defaulted.
dsd::io::Header invocation_header(const CLI::App& sub, int threads) {
    dsd::io::Header h;
    h.emplace_back("command", sub.get_name());
    h.emplace_back("version", dsd::kVersion);
    h.emplace_back("format_version", std::to_string(dsd::kFormatVersion));
    h.emplace_back("threads", std::to_string(threads));
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
            if (value.empty() || opt->get_expected_max() == 0) value = "true";
        } else {
            value = opt->get_default_str();
            if (value.empty() && opt->get_expected_max() == 0) value = "false";
        }
        h.emplace_back(opt->get_lnames().front(), value);
    }
    return h;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace dsd::cli;
    CLI::App app{"Diffusion state distances on weighted graphs"};
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", std::string("dsd ") + dsd::kVersion + " (output format " +
                                          std::to_string(dsd::kFormatVersion) + ")");
    int threads = dsd::kernels::max_threads();
    app.add_option("--threads", threads, "Worker threads for trial- and row-level parallelism")
        ->check(CLI::PositiveNumber);
    app.require_subcommand(1);

    GraphArgs graph;
    auto* c_graph = app.add_subcommand("graph", "Read, validate and normalize an edge list");
    c_graph->add_option("--input", graph.input, "Edge list (a<TAB>b[<TAB>w])")->required()->check(CLI::ExistingFile);
    c_graph->add_option("--out", graph.out, "Cleaned edge list")->required();
    c_graph->add_flag("--lcc", graph.lcc, "Keep only the largest connected component");

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a synthetic graph with ground-truth partitions");
    c_synth->add_option("--model", synth.model)
        ->check(CLI::IsMember({"hsbm", "lowrank", "mixture3", "mixture4", "ring"}));
    c_synth->add_option("--seed", synth.seed);
    c_synth->add_option("--per-cluster", synth.per_cluster, "Points per Gaussian (mixture models)")
        ->check(CLI::PositiveNumber);
    c_synth->add_option("--out-dir", synth.out_dir)->required();

    DsdArgs dsdargs;
    auto* c_dsd = app.add_subcommand("dsd", "Pairwise diffusion state distances");
    c_dsd->add_option("--graph", dsdargs.graph)->required()->check(CLI::ExistingFile);
    c_dsd->add_option("--mode", dsdargs.mode)->check(CLI::IsMember({"exact", "spectral", "approx"}));
    c_dsd->add_option("--M", dsdargs.M, "Eigenpairs kept in approx mode");
    c_dsd->add_option("--weight", dsdargs.weight)->check(CLI::IsMember({"inverse_pi", "one"}));
    c_dsd->add_option("--out-dir", dsdargs.out_dir)->required();
    c_dsd->add_flag("--compare-exact", dsdargs.compare_exact, "Also time exact DSD and report the difference");
    c_dsd->add_option("--eig-cache", dsdargs.cache, "Binary eigenpair cache file");

    EigArgs eig;
    auto* c_eig = app.add_subcommand("eig", "Smallest eigenpairs of the normalized Laplacian");
    c_eig->add_option("--graph", eig.graph)->required()->check(CLI::ExistingFile);
    c_eig->add_option("--M", eig.M);
    c_eig->add_option("--method", eig.method)->check(CLI::IsMember({"automatic", "dense", "lanczos"}));
    c_eig->add_option("--eig-cache", eig.cache);
    c_eig->add_option("--out", eig.out, "Eigenvalue CSV")->required();

    MesoArgs meso;
    auto* c_meso = app.add_subcommand("meso", "Mesoscopic error envelopes against measured residuals");
    c_meso->add_option("--graph", meso.graph)->check(CLI::ExistingFile);
    c_meso->add_option("--partition", meso.partitions, "Partition file, repeatable")->check(CLI::ExistingFile);
    c_meso->add_option("--synth", meso.synth, "Built-in point cloud instead of --graph")
        ->check(CLI::IsMember({"mixture4", "ring"}));
    c_meso->add_option("--seed", meso.seed);
    c_meso->add_option("--per-cluster", meso.per_cluster)->check(CLI::PositiveNumber);
    c_meso->add_flag("--with-trivial", meso.with_trivial, "Add the one-cluster partition");
    c_meso->add_option("--t-max", meso.t_max);
    c_meso->add_option("--out-dir", meso.out_dir)->required();

    LinkPredArgs lp;
    auto* c_lp = app.add_subcommand("linkpred", "Link prediction on sampled connected subgraphs");
    c_lp->add_option("--graph", lp.graph)->required()->check(CLI::ExistingFile);
    c_lp->add_option("--trials", lp.trials)->check(CLI::PositiveNumber);
    c_lp->add_option("--nodes", lp.nodes)->check(CLI::PositiveNumber);
    c_lp->add_option("--removal-frac", lp.removal_frac)->check(CLI::Range(0.0, 0.999999));
    c_lp->add_option("--methods", lp.methods, "dsd, dsd_approx, diffusion, degree, wcn, jaccard, adamic_adar")
        ->delimiter(',');
    c_lp->add_option("--top-n", lp.top_n)->check(CLI::PositiveNumber);
    c_lp->add_option("--approx-M", lp.approx_M)->check(CLI::PositiveNumber);
    c_lp->add_option("--seed", lp.seed);
    c_lp->add_option("--out-dir", lp.out_dir)->required();

    FuncPredArgs fp;
    auto* c_fp = app.add_subcommand("funcpred", "kNN function prediction over a grid of truncations");
    c_fp->add_option("--graph", fp.graph)->required()->check(CLI::ExistingFile);
    c_fp->add_option("--labels", fp.labels, "node<TAB>label rows")->check(CLI::ExistingFile);
    c_fp->add_option("--partition", fp.partition, "Partition file used as labels")->check(CLI::ExistingFile);
    fp.M_grid = {"3", "5", "10", "20", "50", "100", "n"};
    c_fp->add_option("--M-grid", fp.M_grid, "Truncations; 'n' means all eigenpairs")->delimiter(',');
    c_fp->add_option("--k", fp.k)->check(CLI::PositiveNumber);
    c_fp->add_option("--folds", fp.folds)->check(CLI::Range(2, 1000));
    c_fp->add_option("--min-count", fp.min_count);
    c_fp->add_option("--max-count", fp.max_count);
    c_fp->add_option("--seed", fp.seed);
    c_fp->add_option("--out", fp.out, "Accuracy CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    dsd::kernels::set_threads(threads);
    const CLI::App* sub = app.get_subcommands().front();
    const auto header = invocation_header(*sub, threads);
    try {
        if (sub == c_graph) run_graph(graph, header);
        else if (sub == c_synth) run_synth(synth, header);
        else if (sub == c_dsd) run_dsd(dsdargs, header);
        else if (sub == c_eig) run_eig(eig, header);
        else if (sub == c_meso) run_meso(meso, header);
        else if (sub == c_lp) run_linkpred(lp, header);
        else if (sub == c_fp) run_funcpred(fp, header);
    } catch (const dsd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case dsd::ErrorKind::invalid_input: return kExitConfig;
            case dsd::ErrorKind::numerical: return kExitCompute;
            case dsd::ErrorKind::io: return kExitIo;
        }
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return kExitCompute;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCompute;
    }
    return 0;
}
