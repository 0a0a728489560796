#pragma once

#include "geometry.hpp"
#include "analysis.hpp"
#include "operators.hpp"
#include "columns_rows.hpp"
#include "size_energy.hpp"
#include "decomposition.hpp"
#include "probe.hpp"
#include "bochner_riesz.hpp"
#include "experiment.hpp"
