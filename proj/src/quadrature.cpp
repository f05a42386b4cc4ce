#include "casimir/quadrature.hpp"

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

void validate(const QuadratureSpec& spec) {
    if (spec.N < 1) throw ConfigError("quadrature: N must be >= 1");
    if (spec.M < 2 || spec.M % 2 != 0) throw ConfigError("quadrature: M must be even and >= 2");
    if (!(spec.a > 0)) throw ConfigError("quadrature: a must be > 0");
}

Quadrature build_quadrature(const QuadratureSpec& spec) {
    validate(spec);
    using constants::pi;
    const int N = spec.N;
    Quadrature q;
    q.k.resize(N);
    q.w.resize(N);
    for (int i = 1; i <= N; ++i) {
        double t = pi * i / (N + 1.0);
        double ct = 1.0 / std::tan(0.5 * t);
        double sum = 0.0;
        for (int j = 1; j <= N; j += 2) sum += std::sin(j * t) / j;
        // 1 - cos t = 2 sin^2(t/2)
        double sh = std::sin(0.5 * t);
        double omc = 2.0 * sh * sh;
        q.k[i - 1] = spec.a * ct * ct;
        q.w[i - 1] = 8.0 * spec.a * std::sin(t) / (omc * omc) / (N + 1.0) * sum;
    }
    q.phi.resize(spec.M);
    for (int j = 0; j < spec.M; ++j) q.phi[j] = 2.0 * pi * (j + 1) / spec.M;
    q.v = 2.0 * pi / spec.M;
    return q;
}

QuadratureSpec auto_quadrature(double R, double z) {
    if (!(R > 0) || !(z > 0)) throw ConfigError("auto_quadrature: need R > 0, z > 0");
    QuadratureSpec s;
    s.N = static_cast<int>(std::ceil(8.0 * std::sqrt(R / z))) + 20;
    s.M = 2 * s.N;
    s.a = 1.0 / z;
    return s;
}

}  // namespace casimir
