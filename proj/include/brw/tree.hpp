#pragma once
#include <cstdint>
#include <string>
#include <vector>
#include "brw/counts.hpp"

namespace brw {

// Vertex of the rooted d-regular tree, identified by its label path from
// the root.  The root has d children labelled 0..d-1; every other vertex
// has d-1 children labelled 0..d-2 (the remaining neighbor is its parent).
// Labels live in a byte string so vertices hash/compare for free.
struct VertexId {
    std::string path;

    bool is_root() const { return path.empty(); }
    int depth() const { return int(path.size()); }

    VertexId parent() const {
        VertexId p{path};
        if (!p.path.empty()) p.path.pop_back();
        return p;
    }
    VertexId child(int c) const {
        VertexId ch{path};
        ch.path.push_back(char(c));
        return ch;
    }

    bool operator==(const VertexId& o) const { return path == o.path; }
    bool operator!=(const VertexId& o) const { return path != o.path; }
    bool operator<(const VertexId& o) const { return path < o.path; }

    std::string to_string() const;  // "/" for root, else "/1/0/2"
};

struct VertexHash {
    size_t operator()(const VertexId& v) const {
        return std::hash<std::string>{}(v.path);
    }
};

int tree_distance(const VertexId& a, const VertexId& b);

// first step of the geodesic from v toward z (v != z)
VertexId neighbor_toward(const VertexId& v, const VertexId& z);

// all d neighbors of v
std::vector<VertexId> neighbors(const VertexId& v, int d);

// ----- shell combinatorics -------------------------------------------------

// vertices at distance r from the root: 1, d, d(d-1), d(d-1)^2, ...
uint64_t shell_size(int d, int r);

// vertices at distance m from v inside the subtree hanging below v
// (v not the root): (d-1)^m
uint64_t below_shell_size(int d, int m);

// vertices at distance floor(r) from x inside the subtree rooted at x:
// (d-1)^floor(r) of them for non-root x, shell_size(d, floor(r)) for the root
std::vector<VertexId> subtree_shell(const VertexId& x, double r, int d);

// closed ball |B(r)|
u128 ball_size(int d, int r);

// ----- flat shell indexing --------------------------------------------------
// Shell r >= 1 is stored as a flat array; vertex (depth j, index i) has
// children (j+1, i*(d-1)+c), c = 0..d-2, and parent (j-1, i/(d-1)) for
// j >= 2 (depth-1 vertices all parent to the root).  Depth-1 index = label.

inline uint64_t child_index(int d, uint64_t i, int c) {
    return i * uint64_t(d - 1) + uint64_t(c);
}
inline uint64_t parent_index(int d, int j, uint64_t i) {
    return j <= 1 ? 0 : i / uint64_t(d - 1);
}

uint64_t index_of(int d, const VertexId& v);
VertexId vertex_at(int d, int depth, uint64_t index);

// graph distance between (j1,i1) and (j2,i2) in shell coordinates
int index_distance(int d, int j1, uint64_t i1, int j2, uint64_t i2);

} // namespace brw
