#pragma once

#include "crtube/conic.hpp"
#include "crtube/error.hpp"
#include "crtube/expr.hpp"
#include "crtube/flatfamily.hpp"
#include "crtube/harness.hpp"
#include "crtube/jet.hpp"
#include "crtube/jet_newton.hpp"
#include "crtube/newton.hpp"
#include "crtube/parametrize.hpp"
#include "crtube/quadrature.hpp"
#include "crtube/report_io.hpp"
#include "crtube/residual.hpp"
#include "crtube/selftest.hpp"
#include "crtube/surface.hpp"
#include "crtube/univariate.hpp"
