#pragma once

// Everything except the INI configuration layer (config.hpp), which needs
// Boost.PropertyTree.

#include "diagnostics.hpp"
#include "errors.hpp"
#include "euler.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "gates.hpp"
#include "grid.hpp"
#include "harness.hpp"
#include "heat.hpp"
#include "iterate.hpp"
#include "littlewood_paley.hpp"
#include "nonlocal.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "particles.hpp"
#include "quadrature.hpp"
#include "random_fields.hpp"
#include "scaling.hpp"
#include "simulate.hpp"
#include "snapshot.hpp"
#include "spectral.hpp"
#include "transport.hpp"
#include "verify.hpp"
