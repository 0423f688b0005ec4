#pragma once

#include "reflab/corpus.hpp"
#include "reflab/error.hpp"
#include "reflab/experiment.hpp"
#include "reflab/format.hpp"
#include "reflab/metrics.hpp"
#include "reflab/mtp.hpp"
#include "reflab/parallel.hpp"
#include "reflab/reflect.hpp"
#include "reflab/rlkit.hpp"
#include "reflab/rng.hpp"
#include "reflab/sim.hpp"
#include "reflab/stats.hpp"
#include "reflab/synthetic.hpp"
#include "reflab/tasks.hpp"
#include "reflab/theory.hpp"
