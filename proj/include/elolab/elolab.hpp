#pragma once

#include "elolab/core_model.hpp"
#include "elolab/curves_io.hpp"
#include "elolab/data_io.hpp"
#include "elolab/elo_engine.hpp"
#include "elolab/errors.hpp"
#include "elolab/golden_section.hpp"
#include "elolab/matrix.hpp"
#include "elolab/montecarlo.hpp"
#include "elolab/random.hpp"
#include "elolab/scheduling.hpp"
#include "elolab/theory.hpp"
#include "elolab/version.hpp"
