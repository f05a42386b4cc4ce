#pragma once

#include <vector>

namespace casimir {

struct QuadratureSpec {
    int N = 0;       // radial order
    int M = 0;       // angular order, even
    double a = 0.0;  // radial scale, 1/m
};

struct Quadrature {
    std::vector<double> k, w;  // radial nodes (decreasing) and weights
    std::vector<double> phi;   // angular nodes
    double v = 0.0;            // angular weight 2 pi / M
};

void validate(const QuadratureSpec& spec);
Quadrature build_quadrature(const QuadratureSpec& spec);

// N = ceil(8 sqrt(R/z)) + 20, M = 2N, a = 1/z.
QuadratureSpec auto_quadrature(double R, double z);

}  // namespace casimir
