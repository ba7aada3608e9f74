#pragma once

#include "error.hpp"
#include "random.hpp"
#include "parallel.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "polyalg.hpp"
#include "bergman.hpp"
#include "maps.hpp"
#include "sequences.hpp"
#include "operatorlab.hpp"
#include "experiments.hpp"
