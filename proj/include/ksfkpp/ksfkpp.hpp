#pragma once

#include "analysis.hpp"
#include "cauchy.hpp"
#include "core.hpp"
#include "elliptic.hpp"
#include "front_metrics.hpp"
#include "io.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"
#include "slab.hpp"
#include "sweep_io.hpp"
#include "version.hpp"
