#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsd/graph.hpp"
#include "dsd/mesoscopic.hpp"
#include "dsd/metrics.hpp"
#include "dsd/netbio.hpp"
#include "dsd/spectral.hpp"

namespace dsd::io {

/// Ordered `# key=value` lines written at the top of every output file.
using Header = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Tab-separated `a<TAB>b[<TAB>weight]`, `#` lines and blank lines skipped.
std::vector<Edge> parse_edge_list(std::istream& in, const std::string& source = "<stream>");
std::vector<Edge> read_edge_list(const std::string& path);
WeightedGraph read_graph(const std::string& path);
void write_edge_list(const std::string& path, const WeightedGraph& g, const Header& header = {});

/// Tab-separated `node<TAB>label` rows.
std::vector<std::pair<std::string, std::string>> read_labels(const std::string& path);

/// One label per line (1-based cluster ids), optionally `node<TAB>label`.
Partition read_partition(const std::string& path, const WeightedGraph& g);
void write_partition(const std::string& path, const WeightedGraph& g, const Partition& p, const Header& header = {});

void write_header(std::ostream& out, const Header& header);
void write_distance_csv(const std::string& path, const DistanceMatrix& d, const std::vector<std::string>& ids,
                        const Header& header = {});
void write_embedding_tsv(const std::string& path, const DsdEmbedding& emb, const std::vector<std::string>& ids,
                         const Header& header = {});
void write_eigenvalues_csv(const std::string& path, const SpectralBasis& basis, const Header& header = {});
void write_residual_curve_csv(const std::string& path, const ResidualCurve& rc, const std::vector<std::string>& names,
                              const Header& header = {});
void write_points_csv(const std::string& path, const Matrix& points, const std::vector<int>& labels,
                      const Header& header = {});

/// FNV-1a over node ids and weights, for keying cached eigenpairs.
std::uint64_t graph_hash(const WeightedGraph& g);
void save_basis(const std::string& path, const SpectralBasis& basis, std::uint64_t key);
/// Empty when the file is missing or was written for another graph.
std::optional<SpectralBasis> load_basis(const std::string& path, std::uint64_t key);

}  // namespace dsd::io
