#pragma once

#include "mcvmd/errors.hpp"
#include "mcvmd/mvmd.hpp"
#include "mcvmd/noise.hpp"
#include "mcvmd/orbit.hpp"
#include "mcvmd/pipeline.hpp"
#include "mcvmd/series.hpp"
#include "mcvmd/simulate.hpp"
#include "mcvmd/spectral.hpp"
#include "mcvmd/views.hpp"
