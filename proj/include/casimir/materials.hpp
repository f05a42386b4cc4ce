#pragma once

#include <istream>
#include <variant>
#include <vector>

namespace casimir {

struct Drude {
    double omega_p;  // rad/s
    double gamma;    // rad/s
};

struct Plasma {
    double omega_p;  // rad/s
};

// eps == 1 everywhere. Used for the "no scattering" checks.
struct Vacuum {};

struct TablePoint {
    double xi;   // rad/s
    double eps;
};

struct Tabulated {
    std::vector<TablePoint> points;
    std::variant<Drude, Plasma> extrapolation;
};

enum class ZeroFrequencyKind { Drude, Plasma, Vacuum };

class MaterialModel {
public:
    using Variant = std::variant<Drude, Plasma, Tabulated, Vacuum>;

    MaterialModel() : v_(Vacuum{}) {}
    static MaterialModel drude(double omega_p, double gamma);
    static MaterialModel plasma(double omega_p);
    static MaterialModel vacuum() { return MaterialModel(); }
    static MaterialModel tabulated(std::vector<TablePoint> points, std::variant<Drude, Plasma> extrapolation);

    const Variant& variant() const { return v_; }
    bool is_vacuum() const { return std::holds_alternative<Vacuum>(v_); }

    // eps(i xi) for xi > 0.
    double permittivity(double xi) const;

    // Behaviour at xi -> 0; tabulated models defer to their extrapolation.
    ZeroFrequencyKind zero_frequency_kind() const;
    // Plasma wavenumber omega_p / c of the low-frequency model (0 for Drude/vacuum).
    double plasma_wavenumber() const;

private:
    explicit MaterialModel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

struct ThermalSpec {
    double T = 295.25;
    double rel_tol = 1e-8;
    int l_max_cap = 100000;
};

double matsubara_frequency(const ThermalSpec& spec, int l);

// Two-column table with `# extrapolation=...` header. Throws ConfigError with line number.
MaterialModel load_material_table(std::istream& in);

// Drude parameters passing exactly through two (xi, eps) points.
Drude fit_drude(const TablePoint& p1, const TablePoint& p2);

}  // namespace casimir
