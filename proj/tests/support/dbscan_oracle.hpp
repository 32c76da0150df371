#pragma once

// Brute-force DBSCAN reference built from density connectivity directly:
// core points by neighbourhood count, clusters as connected components of
// the core graph, border points joined to an adjacent cluster. Clusters are
// numbered by their lowest core index and a border point takes the lowest
// adjacent cluster, which is what an index-order scan produces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Pt {
    double x;
    double y;
};

inline std::vector<int> dbscan(const std::vector<Pt>& p, double eps, std::size_t min_pts) {
    const std::size_t n = p.size();
    auto near = [&](std::size_t i, std::size_t j) { return std::hypot(p[i].x - p[j].x, p[i].y - p[j].y) <= eps; };
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < n; ++j) c += near(i, j);
        core[i] = c >= min_pts;
    }
    // union-find over core points
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (core[i] && core[j] && near(i, j)) {
                const std::size_t a = find(i), b = find(j);
                parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<int> label(n, -1);
    std::vector<int> root_label(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        const std::size_t r = find(i);
        if (root_label[r] < 0) root_label[r] = next++;
        label[i] = root_label[r];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (core[j] && near(i, j) && (label[i] < 0 || label[j] < label[i])) label[i] = label[j];
        }
    }
    return label;
}

}  // namespace oracle
