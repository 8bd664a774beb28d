#pragma once

// Slice sampler for weighted densities with bounded, invertible weights:
// draw u ~ U(0, w(theta0)), then theta* from the local Gaussian truncated to
// A* = {theta : w(theta) > u}, which is {|theta| > w^{-1}(u)} for the
// supported kinds.

#include <vector>

#include "nollik/kernel.hpp"
#include "nollik/rng.hpp"

namespace nollik {

std::vector<double> slice_sample_weighted(const WeightedKernel& kernel,
                                          std::size_t n, std::uint64_t seed);

// Same two-step scheme for the skew-normal, whose weight 2*Phi(alpha*theta)
// truncates to the half-line {theta > Phi^{-1}(u/2) / alpha}.
std::vector<double> slice_sample_skew_normal(double alpha, std::size_t n,
                                             std::uint64_t seed);

}  // namespace nollik
