#pragma once

#include <becprobe/decoherence.hpp>
#include <becprobe/dispersion.hpp>
#include <becprobe/fit.hpp>
#include <becprobe/nonmarkov.hpp>
#include <becprobe/parallel.hpp>
#include <becprobe/quadrature.hpp>
#include <becprobe/roots.hpp>
#include <becprobe/runner.hpp>
#include <becprobe/scenario.hpp>
#include <becprobe/selftest.hpp>
#include <becprobe/spectral.hpp>
#include <becprobe/units.hpp>
