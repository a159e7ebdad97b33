#pragma once

// Umbrella header: exact evaluation of hidden-action principal–agent
// instances, discretized contract classes with covering guarantees, ERM and
// follow-the-leader learners, shattering certificates, and the adversarial
// constructions used to probe them.

#include "contractlab/bounded.hpp"
#include "contractlab/combinatorial.hpp"
#include "contractlab/errors.hpp"
#include "contractlab/experiments.hpp"
#include "contractlab/generators.hpp"
#include "contractlab/io.hpp"
#include "contractlab/linear.hpp"
#include "contractlab/menus.hpp"
#include "contractlab/model.hpp"
#include "contractlab/online.hpp"
#include "contractlab/parallel.hpp"
#include "contractlab/pdim.hpp"
#include "contractlab/rational.hpp"
#include "contractlab/rng.hpp"
