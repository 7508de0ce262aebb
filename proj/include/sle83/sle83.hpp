#pragma once

#include "sle83/formulas.hpp"
#include "sle83/mc.hpp"
#include "sle83/quadrature.hpp"
#include "sle83/sim.hpp"
#include "sle83/special.hpp"
#include "sle83/verify.hpp"
