#pragma once

// CSV / JSON output helpers shared by the CLI and the test suites. All
// numeric output uses 17 significant digits so that files round-trip to the
// exact in-memory doubles.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwall/energy.hpp"
#include "dwall/model.hpp"

namespace dwall {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// profile.csv: x, A, B, A_prime, B_prime, el_resA, el_resB. Derivatives are
/// central differences with the equilibrium ghost values at the endpoints.
/// Residual cells are blank at the nodes where their stencil is not
/// ghost-free (resA at 0, 1, n-1, n; resB at 0, n).
inline void write_profile_csv(const std::string& path, const Profile& p, const Params& params) {
    const int n = params.n;
    const double h = params.h();
    const ResidualReport res = el_residual(p, params);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "x,A,B,A_prime,B_prime,el_resA,el_resB\n";
    for (int i = 0; i <= n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const double am = (i == 0) ? kGhostLeftA : p.A[u - 1];
        const double ap = (i == n) ? kGhostRightA : p.A[u + 1];
        const double bm = (i == 0) ? kGhostLeftB : p.B[u - 1];
        const double bp = (i == n) ? kGhostRightB : p.B[u + 1];
        out << fmt17(p.x[u]) << ',' << fmt17(p.A[u]) << ',' << fmt17(p.B[u]) << ','
            << fmt17((ap - am) / (2.0 * h)) << ',' << fmt17((bp - bm) / (2.0 * h)) << ',';
        if (i >= 2 && i <= n - 2) out << fmt17(res.resA[u - 2]);
        out << ',';
        if (i >= 1 && i <= n - 1) out << fmt17(res.resB[u - 1]);
        out << '\n';
    }
}

/// Read a profile back from the profile.csv format (first three columns).
inline Profile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Profile p;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (double& val : vals) {
            if (!std::getline(row, cell, ',')) throw std::runtime_error(path + ": short row");
            val = std::stod(cell);
        }
        p.x.push_back(vals[0]);
        p.A.push_back(vals[1]);
        p.B.push_back(vals[2]);
    }
    if (p.x.size() < 2) throw std::runtime_error(path + ": no data rows");
    return p;
}

}  // namespace dwall
