#pragma once

#include "tlr/classify.hpp"
#include "tlr/dataset.hpp"
#include "tlr/experiment.hpp"
#include "tlr/kernel.hpp"
#include "tlr/mmd.hpp"
#include "tlr/parallel.hpp"
#include "tlr/solver.hpp"
#include "tlr/types.hpp"
