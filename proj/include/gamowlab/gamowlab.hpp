#pragma once

#include "gamowlab/error.hpp"
#include "gamowlab/grid.hpp"
#include "gamowlab/hardy.hpp"
#include "gamowlab/resonance.hpp"
#include "gamowlab/gamow.hpp"
#include "gamowlab/evolution.hpp"
#include "gamowlab/smatrix.hpp"
#include "gamowlab/io.hpp"
#include "gamowlab/run.hpp"
