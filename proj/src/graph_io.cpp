#include "sfpkit/graph_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sfpkit {

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void serialize_graph(const SfpGraph& g, std::ostream& out) {
    const SfpParams& p = g.params();
    out << "SFPGRAPH v1 d=" << p.d << " alpha=" << fmt_double(p.alpha)
        << " tau=" << fmt_double(p.tau) << " rho=" << fmt_double(p.rho)
        << " volume=" << fmt_double(p.volume) << " boundary=" << to_string(p.boundary)
        << " seed=" << g.seed() << "\n";
    out << "V " << g.num_vertices() << "\n";
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        out << v;
        for (double c : g.position(v)) out << ' ' << fmt_double(c);
        out << ' ' << fmt_double(g.weight(v)) << "\n";
    }
    out << "E " << g.num_edges() << "\n";
    for (const auto& [u, v] : g.edge_list()) out << u << ' ' << v << "\n";
}

void serialize_graph(const SfpGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    serialize_graph(g, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

struct LineReader {
    std::istream& in;
    const std::string& path;
    std::size_t line_no = 0;

    std::string next() {
        std::string line;
        if (!std::getline(in, line))
            throw ParseError(path, line_no + 1, "unexpected end of file");
        ++line_no;
        return line;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(path, line_no, what);
    }
};

double parse_kv_double(LineReader& r, const std::string& token, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (token.rfind(prefix, 0) != 0) r.fail("expected '" + prefix + "...', got '" + token + "'");
    try {
        return std::stod(token.substr(prefix.size()));
    } catch (const std::exception&) {
        r.fail("cannot parse number in '" + token + "'");
    }
}

}  // namespace

SfpGraph deserialize_graph(std::istream& in, const std::string& path) {
    LineReader r{in, path};

    std::istringstream header(r.next());
    std::string magic, version, tok;
    header >> magic >> version;
    if (magic != "SFPGRAPH") r.fail("not an SFPGRAPH file");
    if (version != "v1") r.fail("unsupported version '" + version + "'");

    SfpParams params;
    std::uint64_t seed = 0;
    header >> tok;
    params.d = static_cast<int>(parse_kv_double(r, tok, "d"));
    header >> tok;
    params.alpha = parse_kv_double(r, tok, "alpha");
    header >> tok;
    params.tau = parse_kv_double(r, tok, "tau");
    header >> tok;
    params.rho = parse_kv_double(r, tok, "rho");
    header >> tok;
    params.volume = parse_kv_double(r, tok, "volume");
    header >> tok;
    if (tok.rfind("boundary=", 0) != 0) r.fail("expected 'boundary=...', got '" + tok + "'");
    params.boundary = boundary_from_string(tok.substr(9));
    header >> tok;
    seed = static_cast<std::uint64_t>(parse_kv_double(r, tok, "seed"));
    params.validate();

    std::istringstream vline(r.next());
    std::size_t n = 0;
    vline >> tok >> n;
    if (tok != "V" || vline.fail()) r.fail("expected 'V <count>'");

    std::vector<double> coords(n * params.d);
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::istringstream ls(r.next());
        std::size_t id = 0;
        ls >> id;
        if (ls.fail() || id != i) r.fail("expected vertex id " + std::to_string(i));
        for (int j = 0; j < params.d; ++j) ls >> coords[i * params.d + j];
        ls >> weights[i];
        if (ls.fail()) r.fail("malformed vertex line");
        if (weights[i] < 1.0) r.fail("vertex weight below 1");
    }

    std::istringstream eline(r.next());
    std::size_t m = 0;
    eline >> tok >> m;
    if (tok != "E" || eline.fail()) r.fail("expected 'E <count>'");

    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::istringstream ls(r.next());
        VertexId u = 0, v = 0;
        ls >> u >> v;
        if (ls.fail()) r.fail("malformed edge line");
        if (u >= v) r.fail("edge endpoints must satisfy u < v");
        if (v >= n) r.fail("edge endpoint out of range");
        edges.emplace_back(u, v);
    }
    return SfpGraph::build(params, seed, std::move(coords), std::move(weights), edges);
}

SfpGraph deserialize_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return deserialize_graph(in, path);
}

}  // namespace sfpkit
