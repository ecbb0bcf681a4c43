#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsd/io.hpp"

namespace dsd::cli {

struct GraphArgs {
    std::string input;
    std::string out;
    bool lcc = false;
};

struct SynthArgs {
    std::string model = "hsbm";
    std::uint64_t seed = 0;
    int per_cluster = 100;
    std::string out_dir;
};

struct DsdArgs {
    std::string graph;
    std::string mode = "exact";
    int M = 50;
    std::string weight = "inverse_pi";
    std::string out_dir;
    bool compare_exact = false;
    std::string cache;
};

struct EigArgs {
    std::string graph;
    int M = 10;
    std::string method = "automatic";
    std::string cache;
    std::string out;
};

struct MesoArgs {
    std::string graph;
    std::vector<std::string> partitions;
    std::string synth;
    std::uint64_t seed = 0;
    int per_cluster = 100;
    bool with_trivial = false;
    int t_max = 200;
    std::string out_dir;
};

struct LinkPredArgs {
    std::string graph;
    int trials = 100;
    int nodes = 400;
    double removal_frac = 0.10;
    std::vector<std::string> methods;
    int top_n = 20000;
    int approx_M = 50;
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct FuncPredArgs {
    std::string graph;
    std::string labels;
    std::string partition;
    std::vector<std::string> M_grid;
    int k = 10;
    int folds = 5;
    int min_count = 0;
    int max_count = 1 << 30;
    std::uint64_t seed = 0;
    std::string out;
};

/// `header` carries the full invocation; each command adds what it learns.
void run_graph(const GraphArgs& a, io::Header header);
void run_synth(const SynthArgs& a, io::Header header);
void run_dsd(const DsdArgs& a, io::Header header);
void run_eig(const EigArgs& a, io::Header header);
void run_meso(const MesoArgs& a, io::Header header);
void run_linkpred(const LinkPredArgs& a, io::Header header);
void run_funcpred(const FuncPredArgs& a, io::Header header);

}  // namespace dsd::cli
