#pragma once

#include <cstddef>
#include <utility>

#include "csums/grid.hpp"

namespace csums {

// Window and semantics of a ⊕ b; throws IncompatibleGeometryError when the
// lattices or contracts cannot be combined.
//   SampleCover(ea) ⊕ SampleCover(eb) -> SampleCover(ea + eb + h)
//   Outer(ra)       ⊕ Outer(rb)       -> Outer(ra + rb + h)
//   Inner           ⊕ Inner           -> Inner
GridGeometry sum_geometry(const GridSet& a, const GridSet& b);
std::pair<Semantics, double> sum_semantics(const GridSet& a, const GridSet& b);

// Reference Minkowski sum: every pair of occupied cells.
GridSet dilate_naive(const GridSet& a, const GridSet& b);

// Convolution of the 0/1 arrays through real-to-complex FFTs. Throws
// PrecisionError when count(a) * count(b) >= 2^52 and ResourceError when
// the padded transform would not fit the memory guard.
GridSet dilate_fft(const GridSet& a, const GridSet& b);

// Pairs of axis-0 runs, written into a packed bit buffer. Exact; fast for
// thin sets in large windows.
GridSet dilate_runs(const GridSet& a, const GridSet& b);

enum class DilationPath { Naive, Fft, Runs };

// Picks the cheapest exact path for the operands.
DilationPath choose_dilation_path(const GridSet& a, const GridSet& b);
GridSet dilate(const GridSet& a, const GridSet& b);

// a ⊕ ... ⊕ a (n copies) by square-and-multiply.
GridSet nfold_sum(const GridSet& a, int n);

// Largest padded FFT size (real samples) the FFT path accepts.
inline constexpr std::size_t kFftMaxCells = std::size_t{1} << 26;

}  // namespace csums
