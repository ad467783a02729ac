#pragma once

#include "types.hpp"
#include "fock.hpp"
#include "ops.hpp"
#include "states.hpp"
#include "random.hpp"
#include "linopt.hpp"
#include "optimize.hpp"
#include "qfi.hpp"
#include "gaussian.hpp"
#include "measures.hpp"
#include "phase.hpp"
#include "estimation.hpp"
#include "closed_form.hpp"
#include "truncation.hpp"
#include "spec_json.hpp"
#include "report.hpp"
#include "verify.hpp"
