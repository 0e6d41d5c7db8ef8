#pragma once

// Isoperimetric profile Phi(s) = |B_s|_w, its inverse Psi, and the radius
// rho(eps) of the translated ball B_rho(eps e_1) with the volume of B_r.

#include <span>
#include <vector>

#include "wiso/measures.hpp"
#include "wiso/report.hpp"
#include "wiso/weights.hpp"

namespace wiso {

class Profile {
public:
    /// Power weights are accepted when p > -n, so that Phi is finite.
    Profile(RadialWeight W, int n);

    const RadialWeight& weight() const { return W_; }
    int dimension() const { return n_; }

    /// n omega_n int_0^s t^{n-1} W(t) dt. Throws ArgumentError for s < 0.
    double phi(double s) const;
    /// n omega_n s^{n-1} W(s).
    double phi_prime(double s) const;
    /// Phi^{-1}(t): bisection to 1e-3 relative, then safeguarded Newton.
    /// Throws SolverError when no bracket is found.
    double psi(double t) const;
    /// 1 / (n omega_n Psi^{n-1} W(Psi)).
    double psi_prime(double t) const;
    /// Radius of the centred ball of weighted volume m.
    double radius_for_mass(double m) const { return psi(m); }
    /// r + 4 Psi(1).
    double truncation_radius(double r) const { return r + 4.0 * psi(1.0); }

private:
    RadialWeight W_;
    int n_;
    // Phi on s = 2^k / 16, for bracketing.
    std::vector<double> s_table_, phi_table_;
};

/// Checks t <= n omega_n Psi(t)^n W(Psi(t)) at every sample; reports the
/// smallest slack factor rhs / t.
ExperimentReport check_profile_inequality(const Profile& P, std::span<const double> t_samples);

struct RhoSolution {
    double rho = 0.0;
    double relative_residual = 0.0;
    int iterations = 0;
};

/// Solves |B_rho(eps e_1)|_w = |B_r|_w. eps = 0 returns r exactly. Throws
/// SolverError when no bracket is found within [r/2, 2r] after expansion.
RhoSolution solve_rho(const RadialWeight& W, double r, int n, double eps);
inline double rho_of_eps(const RadialWeight& W, double r, int n, double eps) {
    return solve_rho(W, r, n, eps).rho;
}

}  // namespace wiso
