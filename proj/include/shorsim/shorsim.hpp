#pragma once

#include "shorsim/bench.hpp"
#include "shorsim/error.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/perfmodel.hpp"
#include "shorsim/qft.hpp"
#include "shorsim/qstate.hpp"
#include "shorsim/sampler.hpp"
#include "shorsim/shor.hpp"
#include "shorsim/state_dump.hpp"
