#include "dsd/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dsd/error.hpp"

namespace dsd::io {

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw io_error("write to '" + path + "' failed");
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t tab = line.find('\t', start);
        out.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool skip_line(const std::string& line) { return line.empty() || line[0] == '#'; }

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw invalid_input(where + ": cannot parse number '" + s + "'");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::vector<Edge> parse_edge_list(std::istream& in, const std::string& source) {
    std::vector<Edge> edges;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (skip_line(line)) continue;
        const auto f = split_tabs(line);
        const std::string where = source + ":" + std::to_string(lineno);
        if (f.size() < 2 || f.size() > 3 || f[0].empty() || f[1].empty())
            throw invalid_input(where + ": expected node_a<TAB>node_b[<TAB>weight]");
        Edge e{f[0], f[1], 1.0};
        if (f.size() == 3) e.weight = parse_double(f[2], where);
        if (!(e.weight >= 0.0))
            throw invalid_input(where + ": negative weight on edge (" + e.a + ", " + e.b + ")");
        edges.push_back(std::move(e));
    }
    return edges;
}

std::vector<Edge> read_edge_list(const std::string& path) {
    auto in = open_in(path);
    return parse_edge_list(in, path);
}

WeightedGraph read_graph(const std::string& path) { return build_graph_from_edges(read_edge_list(path)); }

void write_header(std::ostream& out, const Header& header) {
    for (const auto& [k, v] : header) out << "# " << k << "=" << v << "\n";
}

void write_edge_list(const std::string& path, const WeightedGraph& g, const Header& header) {
    auto out = open_out(path);
    write_header(out, header);
    for (int i = 0; i < g.n(); ++i)
        for (SparseMatrix::InnerIterator it(g.weights(), i); it; ++it)
            if (it.col() >= i) out << g.id(i) << '\t' << g.id(static_cast<int>(it.col())) << '\t' << format_double(it.value()) << '\n';
    finish(out, path);
}

std::vector<std::pair<std::string, std::string>> read_labels(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (skip_line(line)) continue;
        const auto f = split_tabs(line);
        if (f.size() != 2 || f[0].empty() || f[1].empty())
            throw invalid_input(path + ":" + std::to_string(lineno) + ": expected node_id<TAB>label_id");
        rows.emplace_back(f[0], f[1]);
    }
    return rows;
}

Partition read_partition(const std::string& path, const WeightedGraph& g) {
    auto in = open_in(path);
    std::vector<int> labels(g.n(), 0);
    std::vector<char> set(g.n(), 0);
    std::string line;
    long lineno = 0;
    int next = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (skip_line(line)) continue;
        const auto f = split_tabs(line);
        const std::string where = path + ":" + std::to_string(lineno);
        int node = next;
        std::string value = f[0];
        if (f.size() == 2) {
            const auto idx = g.index_of(f[0]);
            if (!idx) throw invalid_input(where + ": unknown node '" + f[0] + "'");
            node = *idx;
            value = f[1];
        } else if (f.size() != 1) {
            throw invalid_input(where + ": expected label or node<TAB>label");
        }
        if (node >= g.n()) throw invalid_input(where + ": more labels than nodes");
        const double v = parse_double(value, where);
        if (v != static_cast<int>(v) || v < 1) throw invalid_input(where + ": labels are positive integers");
        labels[node] = static_cast<int>(v) - 1;
        set[node] = 1;
        ++next;
    }
    for (int i = 0; i < g.n(); ++i)
        if (!set[i]) throw invalid_input(path + ": node '" + g.id(i) + "' has no cluster label");
    return Partition(std::move(labels));
}

void write_partition(const std::string& path, const WeightedGraph& g, const Partition& p, const Header& header) {
    auto out = open_out(path);
    write_header(out, header);
    for (int i = 0; i < g.n(); ++i) out << g.id(i) << '\t' << p.label(i) + 1 << '\n';
    finish(out, path);
}

void write_distance_csv(const std::string& path, const DistanceMatrix& d, const std::vector<std::string>& ids,
                        const Header& header) {
    auto out = open_out(path);
    write_header(out, header);
    out << "node";
    for (const auto& id : ids) out << ',' << id;
    out << '\n';
    for (int i = 0; i < d.n(); ++i) {
        out << ids[i];
        for (int j = 0; j < d.n(); ++j) out << ',' << format_double(d(i, j));
        out << '\n';
    }
    finish(out, path);
}

void write_embedding_tsv(const std::string& path, const DsdEmbedding& emb, const std::vector<std::string>& ids,
                         const Header& header) {
    auto out = open_out(path);
    write_header(out, header);
    for (int i = 0; i < emb.n(); ++i) {
        out << ids[i];
        for (Eigen::Index c = 0; c < emb.coords.cols(); ++c) out << '\t' << format_double(emb.coords(i, c));
        out << '\n';
    }
    finish(out, path);
}

void write_eigenvalues_csv(const std::string& path, const SpectralBasis& basis, const Header& header) {
    auto out = open_out(path);
    write_header(out, header);
    out << "index,mu,lambda\n";
    for (int l = 0; l < basis.M(); ++l)
        out << l + 1 << ',' << format_double(basis.mu[l]) << ',' << format_double(basis.lambda[l]) << '\n';
    finish(out, path);
}

void write_residual_curve_csv(const std::string& path, const ResidualCurve& rc, const std::vector<std::string>& names,
                              const Header& header) {
    if (names.size() != rc.measured.size()) throw invalid_input("one name per partition is required");
    auto out = open_out(path);
    write_header(out, header);
    out << 't';
    for (const auto& n : names) out << ",measured_" << n;
    for (const auto& n : names) out << ",bound_" << n;
    out << ",min_envelope\n";
    for (std::size_t t = 0; t < rc.t.size(); ++t) {
        out << rc.t[t];
        for (const auto& m : rc.measured) out << ',' << format_double(m[t]);
        for (const auto& b : rc.bound) out << ',' << format_double(b[t]);
        out << ',' << format_double(rc.min_envelope[t]) << '\n';
    }
    finish(out, path);
}

void write_points_csv(const std::string& path, const Matrix& points, const std::vector<int>& labels,
                      const Header& header) {
    auto out = open_out(path);
    write_header(out, header);
    out << "x,y,label\n";
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        out << format_double(points(i, 0)) << ',' << format_double(points(i, 1)) << ',' << labels[i] + 1 << '\n';
    finish(out, path);
}

std::uint64_t graph_hash(const WeightedGraph& g) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= p[k];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& id : g.node_ids()) {
        feed(id.data(), id.size());
        feed("\0", 1);
    }
    for (int i = 0; i < g.n(); ++i)
        for (SparseMatrix::InnerIterator it(g.weights(), i); it; ++it) {
            const std::int64_t col = it.col();
            const double v = it.value();
            feed(&i, sizeof i);
            feed(&col, sizeof col);
            feed(&v, sizeof v);
        }
    return h;
}

namespace {
constexpr char kCacheMagic[8] = {'D', 'S', 'D', 'E', 'I', 'G', '0', '1'};
}

void save_basis(const std::string& path, const SpectralBasis& basis, std::uint64_t key) {
    auto out = open_out(path, std::ios::binary);
    const std::int64_t n = basis.n(), M = basis.M();
    out.write(kCacheMagic, sizeof kCacheMagic);
    out.write(reinterpret_cast<const char*>(&key), sizeof key);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&M), sizeof M);
    out.write(reinterpret_cast<const char*>(basis.mu.data()), static_cast<std::streamsize>(M * sizeof(double)));
    out.write(reinterpret_cast<const char*>(basis.phi.data()), static_cast<std::streamsize>(n * M * sizeof(double)));
    finish(out, path);
}

std::optional<SpectralBasis> load_basis(const std::string& path, std::uint64_t key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    std::uint64_t stored = 0;
    std::int64_t n = 0, M = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&stored), sizeof stored);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&M), sizeof M);
    if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0 || stored != key) return std::nullopt;
    if (n <= 0 || M <= 0 || M > n) throw io_error("corrupt eigenpair cache '" + path + "'");
    SpectralBasis b;
    b.mu.resize(M);
    b.phi.resize(n, M);
    in.read(reinterpret_cast<char*>(b.mu.data()), static_cast<std::streamsize>(M * sizeof(double)));
    in.read(reinterpret_cast<char*>(b.phi.data()), static_cast<std::streamsize>(n * M * sizeof(double)));
    if (!in) throw io_error("truncated eigenpair cache '" + path + "'");
    b.lambda = Vector::Ones(M) - b.mu;
    b.psi = b.phi.array().colwise() / b.phi.col(0).array();
    return b;
}

}  // namespace dsd::io
