#ifndef HARVESTLAB_HARVESTLAB_HPP
#define HARVESTLAB_HARVESTLAB_HPP

// Umbrella header.

#include "harvestlab/quadrature.hpp"
#include "harvestlab/physics.hpp"
#include "harvestlab/sweep.hpp"
#include "harvestlab/analysis.hpp"
#include "harvestlab/region_plot.hpp"

#endif  // HARVESTLAB_HARVESTLAB_HPP
