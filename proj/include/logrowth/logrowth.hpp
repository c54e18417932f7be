#pragma once

/// \file
/// Umbrella header.

#include "logrowth/numeric.hpp"
#include "logrowth/geometry.hpp"
#include "logrowth/expr.hpp"
#include "logrowth/logpow.hpp"
#include "logrowth/series.hpp"
#include "logrowth/adaptive.hpp"
#include "logrowth/certificate.hpp"
#include "logrowth/prepare.hpp"
#include "logrowth/optimize.hpp"
#include "logrowth/counterexample.hpp"
#include "logrowth/cones.hpp"
#include "logrowth/ray_growth.hpp"
#include "logrowth/io.hpp"
