#ifndef FQS_FIELD_HPP
#define FQS_FIELD_HPP

#include <functional>

#include "fqs/grid.hpp"

namespace fqs {

// Complex field stored by its Fourier coefficients in FFT index order
// (DC first, last axis fastest).  Coefficient values follow the continuum
// normalization documented in grid.hpp, so they are invariant under exact
// band-limited re-gridding.
struct SpectralField {
  GridPtr grid;
  std::vector<cplx> coeffs;

  SpectralField() = default;
  explicit SpectralField(GridPtr g) : grid(std::move(g)), coeffs(grid->size(), cplx{0.0, 0.0}) {}

  std::size_t size() const { return coeffs.size(); }
};

// Trapezoid approximation of u^(xi) = (2pi)^{-d/2} int e^{-i x xi} u dx.
SpectralField transform_forward(const std::vector<cplx>& physical, const GridPtr& grid);
// Exact inverse of transform_forward.
std::vector<cplx> transform_inverse(const SpectralField& f);

// Multiply coefficients by e^{-i t |xi|^alpha}.  alpha in (1,2]; negative t
// gives the inverse flow.  Pointwise |coeff| is unchanged.
SpectralField propagate_linear(const SpectralField& f, double alpha, double t);

// In-place variant used by the steppers.
void propagate_linear_inplace(SpectralField& f, double alpha, double t);

// Generic radial multiplier m(|xi|) and per-axis helpers.
SpectralField apply_radial_multiplier(const SpectralField& f, const std::function<double(double)>& m);

// Physical-side L^p with measure h^d; p in {1, 4/3, 2, 4, 6, inf} (inf <= 0 marker not used;
// pass p = infinity() for the sup norm).
double lp_norm(const SpectralField& f, double p);
// Fourier-side L^2 (== physical L^2 by Plancherel).
double l2_norm(const SpectralField& f);
// Inhomogeneous Sobolev norm with amplitude weight (1+|xi|^2)^{s/2}.
double sobolev_norm(const SpectralField& f, double s);
// || |x|^w f ||_2 with the physical-space weight, w in {1,2}; x is the
// fundamental-domain coordinate in [-L, L).
double weighted_l2(const SpectralField& f, int w);

bool all_finite(const SpectralField& f);

// Transform of (-i x_axis) f: realizes d/dxi_axis of the coefficient array.
SpectralField xi_derivative(const SpectralField& f, int axis);

// a*u + b*v.
SpectralField axpy(const cplx& a, const SpectralField& u, const cplx& b, const SpectralField& v);

// Pointwise physical product u*v (inputs interpreted as physical fields of the
// coefficients' inverse transforms), returned in spectral form; the result is
// computed alias-free on a band-matched sub-box and truncated to `out_band`
// per-axis integer wavenumber (pass -1 for the default 2/3-rule band).
SpectralField pointwise_product(const SpectralField& u, const SpectralField& v, int out_band = -1);

// Complex conjugate of the physical field: coeffs'(xi) = conj(coeffs(-xi)).
SpectralField conjugate_field(const SpectralField& f);

// Largest per-axis integer wavenumber index with |coeff| > tol * max|coeff|.
int active_band(const SpectralField& f, double tol = 1e-14);

// 2/3-rule dealias band (per-axis integer index).
int dealias_band(const Grid& g);

// Zero all modes with any per-axis |index| > band.
void truncate_band(SpectralField& f, int band);

// Band-matched sub-box machinery (exact for band-limited fields; the box grid
// shares dxi with the parent so coefficients transfer by plain copy).
GridPtr box_grid_for(const Grid& g, int content_band);
SpectralField restrict_to_box(const SpectralField& f, const GridPtr& box, int band);
void accumulate_from_box(SpectralField& full, const SpectralField& box, int band,
                         const cplx& scale = {1.0, 0.0});

}  // namespace fqs

#endif
