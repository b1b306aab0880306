#pragma once

#include "vexlab/conditions.hpp"
#include "vexlab/decomp.hpp"
#include "vexlab/generators.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/io.hpp"
#include "vexlab/maximal.hpp"
#include "vexlab/modular.hpp"
#include "vexlab/report.hpp"
#include "vexlab/rng.hpp"
#include "vexlab/scenario.hpp"
#include "vexlab/schema.hpp"
#include "vexlab/verify.hpp"
