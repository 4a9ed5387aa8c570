#pragma once

#include "efxw/enumeration.hpp"
#include "efxw/fairness.hpp"
#include "efxw/instances.hpp"
#include "efxw/matching.hpp"
#include "efxw/model.hpp"
#include "efxw/oracle.hpp"
#include "efxw/radical.hpp"
#include "efxw/rational.hpp"
#include "efxw/result.hpp"
#include "efxw/solver.hpp"
#include "efxw/welfare.hpp"
