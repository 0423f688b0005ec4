#pragma once

#include "reflab/tasks/mult.hpp"
#include "reflab/tasks/sudoku.hpp"
#include "reflab/tasks/tier.hpp"
#include "reflab/tasks/verifiers.hpp"
#include "reflab/tasks/wide.hpp"
#include "reflab/tasks/ops.hpp"
