#include "brw/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace brw {

std::string VertexId::to_string() const {
    if (path.empty()) return "/";
    std::string s;
    for (char c : path) {
        s += '/';
        s += std::to_string(int((unsigned char)c));
    }
    return s;
}

int tree_distance(const VertexId& a, const VertexId& b) {
    size_t lcp = 0;
    size_t n = std::min(a.path.size(), b.path.size());
    while (lcp < n && a.path[lcp] == b.path[lcp]) ++lcp;
    return int(a.path.size() + b.path.size() - 2 * lcp);
}

VertexId neighbor_toward(const VertexId& v, const VertexId& z) {
    if (v == z) throw std::invalid_argument("neighbor_toward: v == z");
    // v on the root->z path (strict prefix): descend; otherwise go up
    if (v.path.size() < z.path.size() &&
        z.path.compare(0, v.path.size(), v.path) == 0)
        return v.child(int((unsigned char)z.path[v.path.size()]));
    return v.parent();
}

std::vector<VertexId> neighbors(const VertexId& v, int d) {
    std::vector<VertexId> out;
    out.reserve(size_t(d));
    if (v.is_root()) {
        for (int c = 0; c < d; ++c) out.push_back(v.child(c));
    } else {
        out.push_back(v.parent());
        for (int c = 0; c < d - 1; ++c) out.push_back(v.child(c));
    }
    return out;
}

uint64_t shell_size(int d, int r) {
    if (r == 0) return 1;
    uint64_t s = uint64_t(d);
    for (int j = 1; j < r; ++j)
        if (__builtin_mul_overflow(s, uint64_t(d - 1), &s))
            throw std::overflow_error("shell_size: r too large for 64-bit counts");
    return s;
}

uint64_t below_shell_size(int d, int m) {
    uint64_t s = 1;
    for (int j = 0; j < m; ++j)
        if (__builtin_mul_overflow(s, uint64_t(d - 1), &s))
            throw std::overflow_error("below_shell_size: m too large for 64-bit counts");
    return s;
}

std::vector<VertexId> subtree_shell(const VertexId& x, double r, int d) {
    if (!(r >= 0.0)) throw std::invalid_argument("subtree_shell: r must be >= 0");
    const int m = int(r);  // floor for r >= 0
    std::vector<VertexId> cur{x};
    for (int level = 0; level < m; ++level) {
        std::vector<VertexId> nxt;
        nxt.reserve(cur.size() * size_t(d - 1) + 1);
        for (const auto& v : cur) {
            const int nc = v.is_root() ? d : d - 1;
            for (int c = 0; c < nc; ++c) nxt.push_back(v.child(c));
        }
        cur.swap(nxt);
    }
    return cur;
}

u128 ball_size(int d, int r) {
    u128 tot = 1;
    u128 shell = 1;
    for (int j = 1; j <= r; ++j) {
        shell = (j == 1) ? u128(d) : shell * u128(d - 1);
        tot += shell;
    }
    return tot;
}

uint64_t index_of(int d, const VertexId& v) {
    if (v.is_root()) return 0;
    uint64_t i = uint64_t((unsigned char)v.path[0]);
    for (size_t k = 1; k < v.path.size(); ++k)
        i = child_index(d, i, int((unsigned char)v.path[k]));
    return i;
}

VertexId vertex_at(int d, int depth, uint64_t index) {
    VertexId v;
    if (depth == 0) return v;
    v.path.resize(size_t(depth));
    for (int j = depth; j >= 2; --j) {
        v.path[size_t(j - 1)] = char(index % uint64_t(d - 1));
        index /= uint64_t(d - 1);
    }
    v.path[0] = char(index);
    return v;
}

int index_distance(int d, int j1, uint64_t i1, int j2, uint64_t i2) {
    int dist = 0;
    while (j1 > j2) { i1 = parent_index(d, j1, i1); --j1; ++dist; }
    while (j2 > j1) { i2 = parent_index(d, j2, i2); --j2; ++dist; }
    while (i1 != i2) {
        i1 = parent_index(d, j1, i1);
        i2 = parent_index(d, j2, i2);
        --j1; --j2;
        dist += 2;
    }
    return dist;
}

} // namespace brw
