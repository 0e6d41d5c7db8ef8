#pragma once

// Weighted perimeter, weighted volume and weighted symmetric difference for
// the shapes in shapes.hpp. Every result carries a quadrature error estimate.

#include <functional>
#include <memory>

#include "wiso/harmonics.hpp"
#include "wiso/quadrature.hpp"
#include "wiso/shapes.hpp"
#include "wiso/weights.hpp"

namespace wiso {

/// Sphere rules at `resolution` and half of it, with tabulated harmonics up
/// to `max_degree`. The coarse rule drives the error estimates.
class MeasureGrid {
public:
    MeasureGrid(int n, int resolution, int max_degree, int radial_order = 48);

    int dimension() const { return n_; }
    int resolution() const { return fine_->resolution(); }
    int max_degree() const { return table_->max_degree(); }
    int radial_order() const { return radial_order_; }

    const SphereRule& rule() const { return *fine_; }
    const SphereRule& coarse_rule() const { return *coarse_; }
    const BasisTable& table() const { return *table_; }
    const BasisTable& coarse_table() const { return *coarse_table_; }

private:
    int n_;
    int radial_order_;
    std::unique_ptr<SphereRule> fine_, coarse_;
    std::unique_ptr<BasisTable> table_, coarse_table_;
};

/// n omega_n r^{n-1} W(r), exact.
MeasureValue ball_perimeter(const RadialWeight& W, double r, int n);

/// n omega_n int_0^r t^{n-1} W(t) dt, or omega_n r^n when `euclidean`.
/// Throws DomainError for a power weight with p <= -n unless `euclidean`.
MeasureValue ball_volume(const RadialWeight& W, double r, int n, bool euclidean = false);

/// Signed int_a^b t^{n-1} W(t) dt (W = 1 when `euclidean`), Gauss-Legendre
/// of the given order on each smooth piece, closed forms where available.
double layer_mass(const RadialWeight& W, int n, double a, double b, bool euclidean, int order = 24);

MeasureValue perimeter_nearly_spherical(const RadialWeight& W, const NearlySphericalSet& E,
                                        const MeasureGrid& grid, bool estimate_error = true);
MeasureValue volume_nearly_spherical(const RadialWeight& W, const NearlySphericalSet& E,
                                     const MeasureGrid& grid, bool euclidean = false,
                                     bool estimate_error = true);

struct BodyMeasures {
    MeasureValue perimeter;
    MeasureValue volume;
};

/// Axisymmetric reduction in the polar angle from e_1; works for any n >= 2.
/// For power weights the volume must be Euclidean unless eps = 0.
BodyMeasures offcenter_ball_measures(const RadialWeight& W, const OffCenterBall& B,
                                     bool euclidean_volume = false, double rel_tol = 1e-14);

/// Surface integral with the ellipsoid's area element and radial-graph volume.
BodyMeasures ellipsoid_measures(const RadialWeight& W, const Ellipsoid& E, int resolution,
                                bool euclidean = false);

/// |F symdiff B_r|_w for a set F that is a radial graph t < R(x) over the
/// sphere (n = 2, 3). Sign changes of R - r are located and refined so the
/// kinks of |.| fall on panel boundaries.
MeasureValue symdiff_radial_graph(const RadialWeight& W, int n, double r,
                                  const std::function<double(const Vec3&)>& R, int resolution,
                                  bool euclidean = false);

MeasureValue symdiff_measure(const RadialWeight& W, const NearlySphericalSet& E, double r,
                             int resolution, bool euclidean = false);
MeasureValue symdiff_measure(const RadialWeight& W, const Ellipsoid& E, double r, int resolution,
                             bool euclidean = false);
/// Throws UnsupportedGeometry when |eps| >= rho.
MeasureValue symdiff_measure(const RadialWeight& W, const OffCenterBall& B, double r,
                             bool euclidean = false);

/// Node-sum version with |x| replaced by sqrt(x^2 + delta^2); smooth in the
/// coefficients, used inside descent loops.
double symdiff_smoothed(const RadialWeight& W, const NearlySphericalSet& E, const MeasureGrid& grid,
                        bool euclidean, double delta);

}  // namespace wiso
