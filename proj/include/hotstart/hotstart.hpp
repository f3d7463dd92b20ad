#pragma once

// Umbrella header.

#include "hotstart/containment.hpp"
#include "hotstart/controllers.hpp"
#include "hotstart/gcn.hpp"
#include "hotstart/gfs.hpp"
#include "hotstart/heatmap.hpp"
#include "hotstart/hungarian.hpp"
#include "hotstart/indicators.hpp"
#include "hotstart/nsga2.hpp"
#include "hotstart/pipeline.hpp"
#include "hotstart/random.hpp"
#include "hotstart/sim.hpp"
#include "hotstart/stats.hpp"
#include "hotstart/survival.hpp"
#include "hotstart/value_grid.hpp"
#include "hotstart/vec2.hpp"
